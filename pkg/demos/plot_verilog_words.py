"""
From structural Verilog to word groups
======================================

Parse a small post-implementation netlist, convert it to the JSON interchange
form and recover the register words by grouping nets whose drivers share a
type, a boolean equation and a neighbourhood.
"""

from fpga_regroup import extract_reference, group_nets, parse_verilog_subset
from fpga_regroup.ingest import DeviceProfile, dumps
from fpga_regroup.synth import FIXTURE_DIR

profile = DeviceProfile.load(FIXTURE_DIR / "profiles" / "synthetic_100x100.json")
doc = parse_verilog_subset((FIXTURE_DIR / "verilog" / "alu_pipe.v").read_text(), profile)
for w in doc.warnings:
    print("warning:", w)
print(f"{len(doc.cells)} cells on {len({c.placement.site_name for c in doc.cells})} sites")

# the interchange form is canonical, so writing it twice gives identical bytes
text = dumps(doc)
print("JSON bytes:", len(text.encode()))

# net grouping: each word should come back as one group
for w in group_nets(doc):
    print(w.signature[0], len(w.nets), "nets:", ", ".join(w.nets[:3]), "..." if len(w.nets) > 3 else "")

# the hierarchy encoded in the instance names gives the reference labels
ref = extract_reference(doc)
print("reference modules:", len(set(ref.module_label.values())))
