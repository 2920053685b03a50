"""Placement coordinates from Xilinx-style site, tile and clock-region names."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..model import NetlistError, PlacementTriple

_GRID_NAME = re.compile(r"^[A-Za-z0-9_]+?_X(\d+)Y(\d+)$")
_REGION_NAME = re.compile(r"^X(\d+)Y(\d+)$")


class LocationError(NetlistError):
    pass


def _xy(pattern: re.Pattern, text: str, what: str) -> tuple[int, int]:
    m = pattern.match(text or "")
    if not m:
        raise LocationError(f"malformed {what} name: {text!r}")
    return int(m.group(1)), int(m.group(2))


def parse_location(site_name: str, tile_name: str, clock_region_name: str) -> PlacementTriple:
    """Build a PlacementTriple from e.g. ``("SLICE_X12Y34", "CLBLM_R_X10Y60", "X0Y1")``."""
    return PlacementTriple(
        site_xy=_xy(_GRID_NAME, site_name, "site"),
        tile_xy=_xy(_GRID_NAME, tile_name, "tile"),
        clock_region_xy=_xy(_REGION_NAME, clock_region_name, "clock region"),
        site_name=site_name,
        tile_name=tile_name,
        clock_region_name=clock_region_name,
    )


@dataclass(frozen=True)
class DeviceProfile:
    """Site to (tile, clock region) table with an optional bucketing fallback.

    The fallback maps site ``<P>_X<a>Y<b>`` to tile ``<tile_prefix>_X<a//tx>Y<b//ty>``
    and clock region ``X<a//rx>Y<b//ry>``.
    """

    overrides: dict = field(default_factory=dict)
    tile_bucket: Optional[tuple[int, int]] = None
    region_bucket: Optional[tuple[int, int]] = None
    tile_prefix: str = "TILE"

    @classmethod
    def from_dict(cls, data: dict) -> "DeviceProfile":
        buckets = data.get("buckets") or {}
        tile = buckets.get("tile")
        region = buckets.get("region")
        if (tile is None) != (region is None):
            raise LocationError("device profile buckets need both 'tile' and 'region'")
        for b in (tile, region):
            if b is not None and (len(b) != 2 or min(b) < 1):
                raise LocationError(f"bucket sizes must be two positive integers, got {b}")
        overrides = {k: (v[0], v[1]) for k, v in (data.get("overrides") or {}).items()}
        return cls(
            overrides=overrides,
            tile_bucket=tuple(tile) if tile else None,
            region_bucket=tuple(region) if region else None,
            tile_prefix=data.get("tile_prefix", "TILE"),
        )

    @classmethod
    def load(cls, path) -> "DeviceProfile":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        out: dict = {}
        if self.tile_bucket is not None:
            out["buckets"] = {"tile": list(self.tile_bucket), "region": list(self.region_bucket)}
        if self.tile_prefix != "TILE":
            out["tile_prefix"] = self.tile_prefix
        out["overrides"] = {k: list(v) for k, v in self.overrides.items()}
        return out


def derive_tile_and_region(site_name: str, profile: DeviceProfile) -> tuple[str, str]:
    if site_name in profile.overrides:
        return profile.overrides[site_name]
    if profile.tile_bucket is None:
        raise LocationError(f"site {site_name!r} not in device profile and no bucket fallback")
    x, y = _xy(_GRID_NAME, site_name, "site")
    tx, ty = profile.tile_bucket
    rx, ry = profile.region_bucket
    return f"{profile.tile_prefix}_X{x // tx}Y{y // ty}", f"X{x // rx}Y{y // ry}"


def place(site_name: str, profile: DeviceProfile) -> PlacementTriple:
    tile, region = derive_tile_and_region(site_name, profile)
    return parse_location(site_name, tile, region)
