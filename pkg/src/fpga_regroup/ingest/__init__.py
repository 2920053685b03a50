from .jsonio import (
    FORMAT_VERSION,
    NetlistDocument,
    SchemaError,
    dumps,
    from_dict,
    load_any,
    read_json,
    to_dict,
    write_json,
)
from .location import DeviceProfile, LocationError, derive_tile_and_region, parse_location
from .reference import ReferenceHierarchy, extract_reference
from .verilog import VerilogParseError, canonical_init, parse_verilog_subset

__all__ = [
    "FORMAT_VERSION",
    "DeviceProfile",
    "LocationError",
    "NetlistDocument",
    "ReferenceHierarchy",
    "SchemaError",
    "VerilogParseError",
    "canonical_init",
    "derive_tile_and_region",
    "dumps",
    "extract_reference",
    "from_dict",
    "load_any",
    "parse_location",
    "parse_verilog_subset",
    "read_json",
    "to_dict",
    "write_json",
]
