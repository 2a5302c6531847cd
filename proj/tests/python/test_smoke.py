"""End-to-end smoke checks for the python bindings."""

import math
import os
import sys
import tempfile

import numpy as np

import uncross


def path_graph(n):
    d = np.abs(np.subtract.outer(np.arange(n, dtype=float), np.arange(n, dtype=float)))
    edges = [(i, i + 1) for i in range(n - 1)]
    return uncross.GraphInstance(n, edges, d)


def test_weights_and_stress():
    g = path_graph(4)
    w = uncross.build_weights(g)
    assert w.alpha == 2.0
    assert w.values[0, 1] == 1.0
    assert w.values[0, 2] == 0.25
    layout = np.column_stack([np.arange(4, dtype=float), np.zeros(4)])
    assert uncross.stress(layout, g, w) == 0.0
    assert uncross.count_crossings(layout, g) == 0


def test_separation_verdicts():
    crossing_a = np.array([[0.0, 0.0], [1.0, 1.0]])
    crossing_b = np.array([[0.0, 1.0], [1.0, 0.0]])
    res = uncross.solve_separation(crossing_a, crossing_b)
    assert not res.separated
    assert res.violation >= 2.0 - 1e-3

    apart_a = np.array([[-2.0, 0.0], [-1.0, 1.0]])
    apart_b = np.array([[1.0, 0.0], [2.0, -1.0]])
    res = uncross.solve_separation(apart_a, apart_b)
    assert res.separated
    assert res.violation <= 1e-6


def test_smacof_monotone():
    g = path_graph(8)
    w = uncross.build_weights(g)
    result = uncross.smacof_embed(g, w, seed=7)
    trace = result.stress_trace
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


def test_crsm_untangles():
    inst = uncross.generate_planar_instance(30, 40, 7, seed=5)
    report = uncross.crsm_run(inst.graph, seed=5)
    start = report.trace[0].crossings
    assert report.final_crossings < start or start == 0
    assert report.final_crossings == uncross.count_crossings(report.layout, inst.graph)
    assert math.isclose(
        report.final_stress,
        uncross.stress(report.layout, inst.graph, uncross.build_weights(inst.graph)),
        rel_tol=1e-9,
    )


def test_documents_roundtrip():
    inst = uncross.generate_planar_instance(12, 15, 5, seed=3)
    doc = uncross.make_graph_document(inst)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "graph.json")
        uncross.save_graph(doc, path)
        loaded = uncross.load_graph(path)
    assert loaded.graph.node_count == 12
    assert np.allclose(loaded.graph.distances, inst.graph.distances)
    svg = uncross.render_svg(inst.projection, inst.graph, loaded.ids)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"{test.__name__}: ok")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
