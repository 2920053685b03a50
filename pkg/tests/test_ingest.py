import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpga_regroup import NetlistDocument, extract_reference, parse_location, parse_verilog_subset, read_json
from fpga_regroup.ingest import (
    DeviceProfile,
    LocationError,
    SchemaError,
    VerilogParseError,
    canonical_init,
    derive_tile_and_region,
    dumps,
    from_dict,
    load_any,
    to_dict,
    write_json,
)
from fpga_regroup.ingest.reference import word_key
from fpga_regroup.model import Cell
from fpga_regroup.synth import FIXTURE_DIR

VERILOG = FIXTURE_DIR / "verilog" / "alu_pipe.v"
PROFILE = DeviceProfile.load(FIXTURE_DIR / "profiles" / "synthetic_100x100.json")


def module(body: str, ports: str = "") -> str:
    return f"module top ({ports});\n{body}\nendmodule\n"


# locations

def test_parse_location_examples():
    assert parse_location("SLICE_X12Y34", "CLBLM_R_X10Y60", "X0Y1").coords() == (12, 34, 10, 60, 0, 1)
    assert parse_location("SLICE_X0Y0", "CLBLL_L_X0Y0", "X0Y0").coords() == (0,) * 6
    t = parse_location("RAMB18_X1Y7", "BRAM_X6Y35", "X1Y0")
    assert (t.site_xy, t.tile_xy, t.clock_region_xy) == ((1, 7), (6, 35), (1, 0))


@pytest.mark.parametrize("site,tile,region", [
    ("SLICE12Y3", "T_X0Y0", "X0Y0"), ("SLICE_X1Y", "T_X0Y0", "X0Y0"), ("SLICE_X1Y1", "T_X0Y0", "R_X0Y0"),
])
def test_parse_location_rejects(site, tile, region):
    with pytest.raises(LocationError, match="malformed"):
        parse_location(site, tile, region)


def test_derive_tile_and_region_examples():
    table = DeviceProfile.from_dict({"overrides": {"SLICE_X12Y34": ["CLBLM_R_X10Y60", "X0Y1"]}})
    assert derive_tile_and_region("SLICE_X12Y34", table) == ("CLBLM_R_X10Y60", "X0Y1")
    fallback = DeviceProfile.from_dict({"buckets": {"tile": [2, 50], "region": [999, 50]}})
    assert derive_tile_and_region("SLICE_X13Y101", fallback) == ("TILE_X6Y2", "X0Y2")
    with pytest.raises(LocationError):
        derive_tile_and_region("SLICE_X0Y0", DeviceProfile.from_dict({}))


def test_device_profile_round_trip_and_validation():
    assert DeviceProfile.from_dict(PROFILE.to_dict()) == PROFILE
    with pytest.raises(LocationError):
        DeviceProfile.from_dict({"buckets": {"tile": [2, 50]}})
    with pytest.raises(LocationError):
        DeviceProfile.from_dict({"buckets": {"tile": [0, 50], "region": [50, 50]}})


# verilog subset

def test_minimal_fdre():
    doc = parse_verilog_subset(module('(* LOC = "SLICE_X0Y0" *) FDRE r (.D(d), .Q(q));', "d, q"))
    assert len(doc.cells) == 1
    c = doc.cells[0]
    assert (c.cell_type, c.placement.site_name) == ("FDRE", "SLICE_X0Y0")


def test_lut_init_canonicalised():
    doc = parse_verilog_subset(module(
        '(* LOC = "SLICE_X0Y0" *) LUT2 #(.INIT(4\'h8)) g (.I0(a), .I1(b), .O(o));', "a, b, o"))
    assert doc.cells[0].boolean_equation == "1000"
    assert canonical_init("LUT6", "64'h8000000000000000") == "1" + "0" * 63
    assert canonical_init("LUT1", "2'b10") == "10"
    assert canonical_init("LUT3", "8'd5") == "00000101"


def test_escaped_hierarchical_name():
    doc = parse_verilog_subset(module('(* LOC = "SLICE_X3Y4" *) FDRE \\core/alu/sum_reg[3]  (.D(d));', "d"))
    assert doc.cells[0].hier_name == "core/alu/sum_reg[3]"
    assert doc.cells[0].name == "\\core/alu/sum_reg[3]"[1:]


def test_always_block_reports_line():
    text = "module top (clk);\n  input clk;\n  reg r;\n  always @(posedge clk) r <= 1'b0;\nendmodule\n"
    with pytest.raises(VerilogParseError) as err:
        parse_verilog_subset(text)
    assert err.value.line == 4 and "line 4" in str(err.value)


def test_assign_expression_rejected():
    with pytest.raises(VerilogParseError, match="assign"):
        parse_verilog_subset(module("wire a, b, c;\nassign a = b & c;"))


def test_generate_rejected():
    with pytest.raises(VerilogParseError):
        parse_verilog_subset(module("generate\nendgenerate"))


def test_missing_loc_lists_cells():
    body = 'FDRE r1 (.D(d));\nFDRE r2 (.D(d));\n(* LOC = "SLICE_X0Y0" *) FDRE r3 (.D(d));'
    with pytest.raises(VerilogParseError, match="r1, r2"):
        parse_verilog_subset(module(body, "d"))


def test_dsp_rejected():
    with pytest.raises(VerilogParseError, match="DSP"):
        parse_verilog_subset(module('(* LOC = "DSP48_X0Y0" *) DSP48E1 m (.A(a));', "a"))


def test_unsupported_type_skipped_with_warning():
    body = '(* LOC = "SLICE_X0Y0" *) FDRE r (.D(d), .Q(q));\nBUFG b (.I(q), .O(clk));'
    doc = parse_verilog_subset(module(body, "d"))
    assert [c.cell_type for c in doc.cells] == ["FDRE"]
    assert any("BUFG" in w for w in doc.warnings)


def test_nets_follow_vectors_and_aliases():
    body = """
    wire [1:0] x; wire y;
    assign y = x[1];
    (* LOC = "SLICE_X0Y0" *) LUT2 #(.INIT(4'h6)) l0 (.I0(a), .I1(b), .O(x[0]));
    (* LOC = "SLICE_X0Y0" *) LUT2 #(.INIT(4'h8)) l1 (.I0(a), .I1(b), .O(x[1]));
    (* LOC = "SLICE_X0Y1" *) FDRE r0 (.D(x[0]), .Q(q0));
    (* LOC = "SLICE_X0Y1" *) FDRE r1 (.D(y), .Q(q1));
    """
    doc = parse_verilog_subset(module(body, "a, b"))
    edges = doc.graph().edges
    assert edges == {(0, 2), (1, 3)}


def test_multiple_drivers_rejected():
    body = ('(* LOC = "SLICE_X0Y0" *) FDRE r0 (.D(d), .Q(q));\n'
            '(* LOC = "SLICE_X0Y0" *) FDRE r1 (.D(d), .Q(q));')
    with pytest.raises(VerilogParseError, match="multiple drivers"):
        parse_verilog_subset(module(body, "d"))


def test_fixture_parses():
    doc = parse_verilog_subset(VERILOG.read_text(), PROFILE)
    types = [c.cell_type for c in doc.cells]
    assert types.count("LUT2") == 4 and types.count("CARRY4") == 1 and types.count("FDRE") == 12
    carry = doc.cell_by_name()["core/alu/sum_reg[3]_i_2"]
    assert carry.placement.tile_name == "CLB_X5Y0"
    ref = extract_reference(doc)
    alu = [ref.word_label[c.id] for c in doc.cells if c.name.startswith("core/alu/")]
    assert len(set(alu)) == 1
    assert len(set(ref.module_label.values())) == 2


# reference hierarchy

def _doc(names):
    p = parse_location("SLICE_X0Y0", "T_X0Y0", "X0Y0")
    return NetlistDocument(tuple(Cell(i, n or f"anon{i}", "FDRE", "", p, n) for i, n in enumerate(names)), (), "t", "1")


def test_reference_examples():
    ref = extract_reference(_doc(["a/b/sum_reg[3]", "a/b/sum_reg[7]", "a/b/x", "a/c/x", "top/q"]))
    assert ref.word_label[0] == ref.word_label[1]
    assert ref.module_label[2] != ref.module_label[3]
    assert list(ref.word_label.values()).count(ref.word_label[4]) == 1
    assert list(ref.module_label.values()).count(ref.module_label[4]) == 1


def test_reference_excludes_unnamed():
    ref = extract_reference(_doc(["a/q", None, "a/r"]))
    assert set(ref.word_label) == {0, 2} and ref.excluded == ("anon1",)


def test_word_key_rules():
    assert word_key("a/b/sum_reg[3]") == "a/b/sum"
    assert word_key("a/b/sum_reg[3]_i_1") == "a/b/sum"
    assert word_key("a/b/count[12]") == "a/b/count"
    assert word_key("a/b/flag_reg") == "a/b/flag"
    assert word_key("a/b/x[1][2]") == "a/b/x[1]"
    assert word_key("a/b/sum_reg[3]", strip=(r"\[\d+\]$",)) == "a/b/sum_reg"


names = st.lists(st.sampled_from(["a/b/s_reg[0]", "a/b/s_reg[1]", "a/c/t[2]", "a/c/t[5]", "top/q", "x/y/z_reg"]),
                 min_size=1, max_size=12)


@settings(max_examples=100, deadline=None)
@given(names, st.randoms(use_true_random=False))
def test_reference_invariant_under_reordering(ns, rnd):
    order = list(range(len(ns)))
    rnd.shuffle(order)
    base, shuffled = extract_reference(_doc(ns)), extract_reference(_doc([ns[i] for i in order]))

    def partition(labels, ids_to_name):
        groups = {}
        for cid, g in labels.items():
            groups.setdefault(g, []).append(ids_to_name[cid])
        return sorted(sorted(v) for v in groups.values())

    ident = {i: (ns[i], i) for i in range(len(ns))}
    moved = {k: (ns[i], i) for k, i in enumerate(order)}
    assert partition(base.word_label, ident) == partition(shuffled.word_label, moved)
    assert partition(base.module_label, ident) == partition(shuffled.module_label, moved)
    assert sorted(set(shuffled.word_label.values())) == list(range(len(set(shuffled.word_label.values()))))


# JSON interchange

def test_json_round_trip_verilog_fixture(tmp_path):
    doc = parse_verilog_subset(VERILOG.read_text(), PROFILE)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(doc, p1)
    back = read_json(p1)
    assert back == doc
    write_json(back, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_json_keys_and_layout(tmp_path):
    data = to_dict(parse_verilog_subset(VERILOG.read_text(), PROFILE))
    assert list(data) == ["device", "format_version", "cells", "nets"]
    assert set(data["cells"][0]) == {"name", "type", "init", "site", "tile", "clock_region", "hier_name"}
    assert set(data["nets"][0]) == {"name", "source", "sinks"}
    assert set(data["nets"][0]["source"]) == {"cell", "pin"}


def test_schema_missing_cells_pointer():
    data = to_dict(parse_verilog_subset(VERILOG.read_text(), PROFILE))
    del data["cells"]
    with pytest.raises(SchemaError) as err:
        from_dict(data)
    assert err.value.pointer == "/cells"


def test_schema_nested_pointer():
    data = to_dict(parse_verilog_subset(VERILOG.read_text(), PROFILE))
    data["cells"][2]["site"] = 17
    with pytest.raises(SchemaError) as err:
        from_dict(data)
    assert err.value.pointer == "/cells/2/site"


def test_version_gate():
    data = to_dict(parse_verilog_subset(VERILOG.read_text(), PROFILE))
    assert from_dict(dict(data, format_version="1"))
    with pytest.raises(SchemaError, match="upgrade") as err:
        from_dict(dict(data, format_version="2"))
    assert err.value.pointer == "/format_version"


def test_unknown_cell_reference_in_net():
    data = to_dict(parse_verilog_subset(VERILOG.read_text(), PROFILE))
    data["nets"][0]["source"]["cell"] = "ghost"
    with pytest.raises(SchemaError, match="ghost"):
        from_dict(data)


def test_load_any_dispatches(tmp_path):
    v = tmp_path / "n.v"
    v.write_text(VERILOG.read_text())
    doc = load_any(v, PROFILE)
    j = tmp_path / "n.json"
    j.write_text(dumps(doc))
    assert load_any(j) == doc
    assert json.loads(j.read_text())["format_version"] == "1"


def test_shuffled_cell_declaration_changes_ids_not_labels():
    lines = VERILOG.read_text().splitlines()
    head = [i for i, l in enumerate(lines) if l.strip().startswith("(*")]
    pairs = [(lines[i], lines[i + 1]) for i in head]
    random.Random(3).shuffle(pairs)
    body = [l for p in pairs for l in p]
    text = "\n".join(lines[:head[0]] + body + lines[head[-1] + 2:])
    a = parse_verilog_subset(VERILOG.read_text(), PROFILE)
    b = parse_verilog_subset(text, PROFILE)
    ra, rb = extract_reference(a), extract_reference(b)
    name_a = {c.id: c.name for c in a.cells}
    name_b = {c.id: c.name for c in b.cells}
    same_a = {(name_a[i], name_a[j]) for i in ra.word_label for j in ra.word_label if ra.word_label[i] == ra.word_label[j]}
    same_b = {(name_b[i], name_b[j]) for i in rb.word_label for j in rb.word_label if rb.word_label[i] == rb.word_label[j]}
    assert same_a == same_b
