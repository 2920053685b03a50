import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpga_regroup import Cell, Net, NetlistGraph, PlacementTriple, build_graph, induced_subgraph
from fpga_regroup.model import NetlistError, init_width, is_dsp

P0 = PlacementTriple((0, 0), (0, 0), (0, 0), "SLICE_X0Y0", "CLB_X0Y0", "X0Y0")


def cells(*types):
    return [Cell(i, f"c{i}", t, "", P0) for i, t in enumerate(types)]


def test_build_graph_examples():
    g = build_graph([], [])
    assert len(g) == 0 and g.edges == frozenset()

    g = build_graph(cells("LUT6", "FDRE"), [Net("n", (0, "O"), ((1, "D"),))])
    assert len(g) == 2 and g.edges == {(0, 1)}

    nets = [Net("n1", (0, "O"), ((1, "D"),)), Net("n2", (0, "O6"), ((1, "CE"),))]
    g = build_graph(cells("LUT6", "FDRE", "FDRE"), nets)
    assert len(g) == 3 and g.edges == {(0, 1)}


def test_build_graph_keeps_self_loops_and_labels():
    g = build_graph(cells("FDRE", "LUT1"), [Net("q", (0, "Q"), ((0, "D"), (1, "I0")))])
    assert g.edges == {(0, 0), (0, 1)}
    assert g.label_map() == {0: "FDRE", 1: "LUT1"}


def test_build_graph_names_bad_net():
    with pytest.raises(NetlistError, match="bad_net"):
        build_graph(cells("LUT6"), [Net("bad_net", (0, "O"), ((5, "D"),))])
    with pytest.raises(NetlistError, match="src_net"):
        build_graph(cells("LUT6"), [Net("src_net", (3, "O"), ())])


def test_induced_subgraph_examples():
    nets = [Net("ab", (0, "O"), ((1, "I0"),)), Net("bc", (1, "O"), ((2, "I0"),))]
    g = build_graph(cells("LUT1", "LUT1", "LUT1"), nets)
    assert induced_subgraph(g, [0, 1, 2]) == g
    assert len(induced_subgraph(g, [])) == 0
    sub = induced_subgraph(g, [0, 2])
    assert sub.nodes == (0, 2) and sub.edges == frozenset()
    assert sub.labels == ("LUT1", "LUT1")
    with pytest.raises(NetlistError):
        induced_subgraph(g, [7])


edge_lists = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=20)
id_sets = st.sets(st.integers(0, 7))


@settings(max_examples=100, deadline=None)
@given(edge_lists, id_sets, id_sets)
def test_induced_subgraph_union_contains_parts(edges, a, b):
    cs = cells(*["LUT2"] * 8)
    g = build_graph(cs, [Net(f"n{k}", (s, "O"), ((t, "I0"),)) for k, (s, t) in enumerate(edges)])
    assert build_graph(cs, [Net(f"n{k}", (s, "O"), ((t, "I0"),)) for k, (s, t) in enumerate(edges)]) == g
    union = induced_subgraph(g, sorted(a | b))
    part = induced_subgraph(g, sorted(a))
    assert set(part.nodes) <= set(union.nodes)
    assert part.edges <= union.edges
    assert part.edges == {(s, t) for s, t in g.edges if s in a and t in a}


def test_shape_key_is_id_free():
    g1 = NetlistGraph((3, 9), ("LUT6", "FDRE"), frozenset({(3, 9)}))
    g2 = NetlistGraph((10, 11), ("LUT6", "FDRE"), frozenset({(10, 11)}))
    assert g1.shape_key() == g2.shape_key()


def test_placement_validation():
    with pytest.raises(NetlistError):
        PlacementTriple((-1, 0), (0, 0), (0, 0), "s", "t", "r")
    assert P0.coords() == (0, 0, 0, 0, 0, 0)


def test_cell_rejects_dsp():
    assert is_dsp("DSP48E1")
    with pytest.raises(NetlistError):
        Cell(0, "mult", "DSP48E1", "", P0)


def test_init_width_and_dangling():
    assert init_width("LUT6") == 64 and init_width("LUT1") == 2 and init_width("FDRE") is None
    assert Net("n", (0, "O"), ()).dangling
