"""Reference hierarchy (word and module labels) from hierarchical cell names."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

# Applied in order, each at most once. "_i_<n>" is Vivado's naming for the
# LUT driving a register (``sum_reg[3]_i_1``).
DEFAULT_WORD_STRIP = (r"_i_\d+$", r"\[\d+\]$", r"_reg$")


@dataclass(frozen=True)
class ReferenceHierarchy:
    """Dense per-cell group ids; cells without a hierarchical name are absent."""

    word_label: dict = field(default_factory=dict)
    module_label: dict = field(default_factory=dict)
    excluded: tuple = ()

    def labels(self, level: str, ids: Sequence[int]) -> list[int]:
        table = {"word": self.word_label, "module": self.module_label}[level]
        return [table[i] for i in ids]


def word_key(hier_name: str, strip: Iterable[str] = DEFAULT_WORD_STRIP) -> str:
    key = hier_name
    for pattern in strip:
        key = re.sub(pattern, "", key, count=1)
    return key


def module_key(hier_name: str) -> str:
    return hier_name.rsplit("/", 1)[0] if "/" in hier_name else ""


def _dense(keys: dict) -> dict:
    ids: dict = {}
    return {cid: ids.setdefault(k, len(ids)) for cid, k in keys.items()}


def extract_reference(doc, word_strip: Iterable[str] = DEFAULT_WORD_STRIP) -> ReferenceHierarchy:
    """Group cells into reference words and modules.

    Words: hierarchical names equal after stripping the ``word_strip``
    suffixes (by default a driver suffix, one ``[int]`` bit index, and
    ``_reg``). Modules: names sharing the prefix up to the last ``/``.
    Group ids are assigned by first occurrence in cell-id order.
    """
    strip = tuple(word_strip)
    named = sorted((c for c in doc.cells if c.hier_name), key=lambda c: c.id)
    excluded = tuple(c.name for c in doc.cells if not c.hier_name)
    return ReferenceHierarchy(
        word_label=_dense({c.id: word_key(c.hier_name, strip) for c in named}),
        module_label=_dense({c.id: module_key(c.hier_name) for c in named}),
        excluded=excluded,
    )
