import pytest

from shuttlesat.layout import (Edge, EdgeKind, Layout, LayoutError, Node, NodeKind, build_grid_layout,
                               memory_edge_count)


def test_counts_small_racetrack():
    L = build_grid_layout(2, 2, 1, 5)
    assert len(L.memory_edges) == 12
    assert L.num_edges == 14
    # 4 junctions + 2 x 4 minor nodes + processing node
    assert len(L.nodes) == 4 + 8 + 1


@pytest.mark.parametrize("m,n,v,h", [(2, 2, 1, 1), (3, 3, 1, 1), (2, 5, 3, 2), (4, 3, 2, 1)])
def test_memory_edge_formula(m, n, v, h):
    assert len(build_grid_layout(m, n, v, h).memory_edges) == memory_edge_count(m, n, v, h)


def test_node_kinds_and_degrees():
    L = build_grid_layout(3, 4, 2, 3)
    for nd in L.nodes:
        deg = len(L.incident(nd.index))
        if nd.kind is NodeKind.MINOR:
            assert deg == 2
        if nd.kind is NodeKind.PROCESSING:
            assert set(L.incident(nd.index)) == {L.inbound, L.outbound}


def test_default_attachment():
    L = build_grid_layout(3, 3, 1, 1)
    assert L.grid.exit == (0, 2) and L.grid.entry == (1, 2)
    assert L.nodes[L.exit_node].pos == (0.0, 2.0)
    assert L.nodes[L.entry_node].pos == (1.0, 2.0)


def test_shared_attachment_allowed():
    L = build_grid_layout(3, 3, 1, 1, exit=(0, 2), entry=(0, 2))
    assert L.exit_node == L.entry_node
    # outbound and inbound touch at the junction and at the processing node
    assert set(L.edges[L.inbound].endpoints) == set(L.edges[L.outbound].endpoints)


@pytest.mark.parametrize("kw", [dict(exit=(1, 1)), dict(entry=(1, 1)), dict(exit=(5, 0))])
def test_bad_attachment(kw):
    with pytest.raises(LayoutError):
        build_grid_layout(3, 3, 1, 1, **kw)


@pytest.mark.parametrize("args", [(1, 3, 1, 1), (2, 1, 1, 1), (2, 2, 0, 1), (2, 2, 1, 0)])
def test_bad_dimensions(args):
    with pytest.raises(LayoutError):
        build_grid_layout(*args)


def test_interface_moves():
    L = build_grid_layout(3, 3, 1, 1)
    e_in, e_out = L.inbound, L.outbound
    assert L.extended_neighbors(e_out) == {e_out, e_in}
    assert L.extended_neighbors(e_in) == (L.neighbors(e_in) - {e_out}) | {e_in}
    assert e_out in L.former_edges(e_in)
    assert e_in not in L.former_edges(e_out)


def test_lattice_extended_equals_neighbors():
    # every lattice edge ends in junctions, so passing "one junction" is just adjacency
    L = build_grid_layout(3, 3, 1, 1)
    for e in L.memory_edges:
        assert L.extended_neighbors(e) == L.neighbors(e)
        assert all(p == () for p in L.moves(e).values())


def test_former_is_symmetric_on_memory():
    L = build_grid_layout(3, 3, 1, 1)
    mem = set(L.memory_edges)
    for e in mem:
        assert L.former_edges(e) & mem == (L.extended_neighbors(e) - {e}) & mem


def test_segment_moves_and_paths():
    # one horizontal street of four sites between junctions (0,0) and (0,1)
    L = build_grid_layout(2, 2, 1, 4)
    a, b, c, d = 0, 1, 2, 3
    assert {a, b, c, d} <= L.extended_neighbors(b)
    assert L.path_edges(a, d) == (b, c)
    assert L.path_edges(d, a) == (c, b)
    assert L.path_edges(b, c) == ()
    # beyond the right junction: the vertical edge and the outbound edge
    right = set(L.incident(L.nodes[1].index)) - {d}
    assert right <= L.extended_neighbors(a)
    assert L.path_edges(a, L.outbound) == (b, c, d)


def test_unreachable_path():
    L = build_grid_layout(3, 3, 1, 1)
    far = max(L.memory_edges)
    with pytest.raises(LayoutError):
        L.path_edges(0, far)


def test_candidate_moves_blocking():
    L = build_grid_layout(2, 2, 1, 4)
    # top street is edges 0..3, edge 8 hangs off the left junction; a chain on 2
    # blocks 3 and everything past the right junction
    got = L.candidate_moves(0, {2})
    assert got == {0, 1, 8}
    assert L.candidate_moves(0, set()) == L.extended_neighbors(0)


def test_traversed_nodes():
    L = build_grid_layout(2, 2, 1, 4)
    assert L.traversed_nodes(0, 0) == ()
    assert L.traversed_nodes(0, 1) == L.edges[0].endpoints[1:]
    # 0 -> outbound crosses three minor nodes and the exit junction
    assert len(L.traversed_nodes(0, L.outbound)) == 4
    assert L.traversed_nodes(L.outbound, L.inbound) == (L.processing_node,)


def test_without_edges_reindexes():
    L = build_grid_layout(3, 3, 1, 1)
    sub = L.without_edges([0, 1])
    assert len(sub.memory_edges) == len(L.memory_edges) - 2
    assert sub.grid is None
    assert sub.edges[sub.inbound].kind is EdgeKind.INBOUND
    with pytest.raises(LayoutError):
        L.without_edges([L.inbound])


def test_disconnected_memory_rejected():
    nodes = tuple(Node(k, NodeKind.MAJOR) for k in range(4)) + (Node(4, NodeKind.PROCESSING),)
    edges = (Edge(0, 0, 1), Edge(1, 2, 3), Edge(2, 1, 4, EdgeKind.OUTBOUND), Edge(3, 4, 1, EdgeKind.INBOUND))
    with pytest.raises(LayoutError):
        Layout(nodes, edges)


def test_explicit_layout_validation():
    nodes = (Node(0, NodeKind.MAJOR), Node(1, NodeKind.MAJOR), Node(2, NodeKind.PROCESSING))
    edges = (Edge(0, 0, 1), Edge(1, 1, 2, EdgeKind.OUTBOUND), Edge(2, 2, 1, EdgeKind.INBOUND))
    L = Layout(nodes, edges)
    assert L.memory_edges == (0,)
    with pytest.raises(LayoutError):
        Layout(nodes, edges[:2])
    with pytest.raises(LayoutError):
        Layout(nodes[:2] + (Node(2, NodeKind.MINOR),), edges)


def test_equality_and_hash():
    a, b = build_grid_layout(2, 3, 1, 2), build_grid_layout(2, 3, 1, 2)
    assert a == b and hash(a) == hash(b)
    assert a != build_grid_layout(2, 3, 1, 2, entry=(0, 2))
