from __future__ import annotations

import os

import networkx as nx
import pytest

from conftest import DATA_DIR
from ehrhartroots.ehrhart_engine import delta_from_ehrhart, ehrhart_by_interpolation, is_gorenstein
from ehrhartroots.graph_polytopes import (
    EdgeFileError,
    Graph,
    GraphError,
    analyze_graph,
    canonical_form,
    complete_bipartite,
    crosspolytope,
    cycle,
    enumerate_connected_graphs,
    graph_from_edges,
    k2m_delta,
    path,
    read_edge_file,
    scan_graphs,
    symmetric_edge_polytope,
    tree_delta_expected,
)


def _delta(g: Graph):
    p = symmetric_edge_polytope(g)
    return delta_from_ehrhart(ehrhart_by_interpolation(p), p.ambient_dim)


def test_symmetric_edge_polytope_examples():
    assert symmetric_edge_polytope(path(3)).vertices == ((1, -1), (-1, 1), (0, 1), (0, -1))
    assert symmetric_edge_polytope(graph_from_edges([(1, 2)])).vertices == ((1,), (-1,))
    c4 = symmetric_edge_polytope(cycle(4))
    assert set(c4.vertices) == {
        (1, -1, 0), (-1, 1, 0), (0, 1, -1), (0, -1, 1),
        (0, 0, 1), (0, 0, -1), (1, 0, 0), (-1, 0, 0),
    }


def test_symmetric_edge_polytope_is_centrally_symmetric():
    for g in enumerate_connected_graphs(4):
        verts = set(symmetric_edge_polytope(g).vertices)
        assert verts == {tuple(-c for c in v) for v in verts}


def test_disconnected_graph_names_a_vertex():
    with pytest.raises(GraphError) as err:
        symmetric_edge_polytope(graph_from_edges([(1, 2), (3, 4)]))
    assert err.value.separated_vertex == 3


def test_graph_validation():
    with pytest.raises(GraphError):
        Graph(n_vertices=3, edges=frozenset({(1, 1)}))
    with pytest.raises(GraphError):
        Graph(n_vertices=2, edges=frozenset({(1, 3)}))
    with pytest.raises(GraphError):
        graph_from_edges([(1, 2), (2, 1)])
    assert Graph(n_vertices=2, edges=frozenset({(2, 1)})).sorted_edges == [(1, 2)]


def test_named_graphs_match_networkx():
    for ours, theirs in [
        (cycle(6), nx.cycle_graph(6)),
        (path(5), nx.path_graph(5)),
        (complete_bipartite(2, 3), nx.complete_bipartite_graph(2, 3)),
    ]:
        assert nx.is_isomorphic(ours.to_networkx(), theirs)


def test_crosspolytope_and_expected_deltas():
    assert crosspolytope(2).vertices == ((1, 0), (-1, 0), (0, 1), (0, -1))
    assert crosspolytope(1).vertices == ((1,), (-1,))
    assert tree_delta_expected(2).entries == (1, 2, 1)
    assert tree_delta_expected(3).entries == (1, 3, 3, 1)
    assert tree_delta_expected(1).entries == (1, 1)
    p = crosspolytope(3)
    assert delta_from_ehrhart(ehrhart_by_interpolation(p), 3) == tree_delta_expected(3)


def test_k2m_generating_polynomial():
    assert k2m_delta(4).entries == (1, 3, 3, 1, 0)
    assert k2m_delta(5).entries == (1, 6, 10, 6, 1, 0)
    with pytest.raises(GraphError):
        k2m_delta(3)


def test_k2m_brute_force():
    # K(2, 2) is C4: 8 vertices plus the origin, so delta_1 = 9 - 4 = 5
    assert _delta(complete_bipartite(2, 2)).entries == (1, 5, 5, 1)
    k23 = _delta(complete_bipartite(2, 3))
    assert len(k23) == 5
    assert k23[1] == 13 - 5
    assert is_gorenstein(k23)
    # the stated expansion gives delta_1 = 3d - 9; the polytope has 3d - 7
    assert k23[1] - k2m_delta(5)[1] == 2


def test_enumeration_counts():
    cases = [(1, True, 1), (2, True, 1), (3, True, 2), (4, True, 6), (5, True, 21), (3, False, 4), (4, False, 38)]
    for n, dedup, expected in cases:
        assert len(enumerate_connected_graphs(n, dedup)) == expected, (n, dedup)


def test_enumeration_is_isomorphism_free():
    graphs = [g.to_networkx() for g in enumerate_connected_graphs(5)]
    for i in range(len(graphs)):
        for j in range(i + 1, len(graphs)):
            assert not nx.is_isomorphic(graphs[i], graphs[j])


def test_enumeration_limit():
    with pytest.raises(GraphError):
        enumerate_connected_graphs(9)


def test_canonical_form_is_label_independent():
    a = graph_from_edges([(1, 2), (2, 3), (3, 4), (1, 3)])
    b = graph_from_edges([(4, 3), (3, 2), (2, 1), (4, 2)])
    assert canonical_form(a) == canonical_form(b)
    assert canonical_form(path(3)) == canonical_form(graph_from_edges([(1, 3), (2, 3)]))
    assert canonical_form(path(4)) != canonical_form(graph_from_edges([(1, 2), (1, 3), (1, 4)]))


def test_trees_are_crosspolytopes():
    for n in range(2, 7):
        trees = [g for g in enumerate_connected_graphs(n) if len(g.edges) == n - 1]
        assert trees
        for g in trees:
            rec = analyze_graph(g)
            assert rec.delta == tree_delta_expected(n - 1)
            assert rec.critical_line
            assert all(abs(r.re + 0.5) <= 1e-6 for r in rec.report.roots)


def test_star_on_four_vertices():
    rec = analyze_graph(read_edge_file(os.path.join(DATA_DIR, "tree4.txt")))
    assert rec.delta.entries == (1, 3, 3, 1)
    assert rec.certificate.passed


def test_cycle_of_length_six():
    rec = analyze_graph(read_edge_file(os.path.join(DATA_DIR, "c6.txt")))
    assert rec.dim == 5
    assert len(rec.report.roots) == 5
    assert all(abs(r.re + 0.5) <= 1e-6 for r in rec.report.roots)
    assert rec.certificate.passed
    assert rec.critical_line


@pytest.mark.slow
def test_cycle_of_length_seven():
    rec = analyze_graph(read_edge_file(os.path.join(DATA_DIR, "c7.txt")))
    assert rec.dim == 6
    assert abs(rec.worst_root.real + 0.5) >= 1e-3
    assert not rec.certificate.passed
    assert rec.certificate.step == "even_part_count"
    assert rec.critical_line is False
    assert rec.gorenstein
    assert rec.root_symmetry


def test_scan_small_graphs():
    records = list(scan_graphs(5))
    assert len(records) == 1 + 2 + 6 + 21
    assert [r.graph.n_vertices for r in records] == sorted(r.graph.n_vertices for r in records)
    for rec in records:
        assert rec.error is None
        assert rec.violations == []
        assert rec.gorenstein
        assert rec.report.conjecture_band_ok
        assert rec.root_symmetry


def test_scan_parallel_order_matches_serial():
    serial = [r.as_dict() for r in scan_graphs(4, jobs=1)]
    parallel = [r.as_dict() for r in scan_graphs(4, jobs=2)]
    assert serial == parallel


def test_scan_limit():
    with pytest.raises(GraphError):
        list(scan_graphs(8))


def test_read_edge_file_errors(tmp_path):
    cases = [
        ("1 2\n2 2\n", 2),
        ("1 2\n1 2 3\n", 2),
        ("# c\n1 2\n2 1\n", 3),
        ("1 x\n", 1),
        ("0 1\n", 1),
    ]
    for i, (text, line_no) in enumerate(cases):
        f = tmp_path / f"bad{i}.txt"
        f.write_text(text, encoding="utf-8")
        with pytest.raises(EdgeFileError) as err:
            read_edge_file(str(f))
        assert err.value.line_no == line_no, text
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n", encoding="utf-8")
    with pytest.raises(EdgeFileError):
        read_edge_file(str(empty))
