#!/usr/bin/env python

import unittest

import numpy as np

from framework import corridor
from ltlgcs.error import (
    CostSpecError,
    LetterError,
    OrderError,
    UnboundedVertexError,
    UnsatisfiableError,
)
from ltlgcs.gcs.graph import (
    SOURCE,
    TARGET,
    CostSpec,
    Gcs,
    Norm,
    Vertex,
    continuity,
    difference_matrix,
    edge_cost,
    loop_problem,
    pin_start,
    product,
    stationary,
)
from ltlgcs.geometry import HPolytope, LabeledRegion
from ltlgcs.ltl.automata import ltlf_to_dfa
from ltlgcs.ltl.buchi import ltl_to_dba
from ltlgcs.ltl.parser import parse
from ltlgcs.transys import build_ts

Q0 = np.array([0.5, 0.5])


def corridor_product(text, k=3, d=1, **kw):
    ts = build_ts(corridor(), Q0)
    aut = ltlf_to_dfa(parse(text), ts.letters())
    return ts, aut, product(ts, aut, k, d, CostSpec(), Q0, **kw)


class TestCost(unittest.TestCase):
    def test_differences(self):
        np.testing.assert_array_equal(
            difference_matrix(3, 1), [[-1, 1, 0, 0], [0, -1, 1, 0], [0, 0, -1, 1]]
        )
        np.testing.assert_array_equal(difference_matrix(2, 2), [[1, -2, 1]])

    def test_length(self):
        straight = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).reshape(-1)
        (term,) = edge_cost(CostSpec(), 2, 2)
        self.assertAlmostEqual(term.value(straight, Norm.L2), 2.0)
        diagonal = np.array([[0.0, 0.0], [1.0, 1.0]]).reshape(-1)
        (term,) = edge_cost(CostSpec(Norm.L1), 1, 2)
        self.assertAlmostEqual(term.value(diagonal, Norm.L1), 2.0)
        self.assertAlmostEqual(term.value(diagonal, Norm.L2), np.sqrt(2.0))

    def test_derivative_penalty(self):
        straight = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).reshape(-1)
        spec = CostSpec(length_weight=0.0, derivative_penalties=((1, 0.5),))
        (term,) = edge_cost(spec, 2, 2)
        # velocity control points are (2, 0) twice
        self.assertAlmostEqual(term.value(straight, Norm.L2), 2.0)
        self.assertEqual(edge_cost(CostSpec(length_weight=0.0), 2, 2), [])

    def test_validate(self):
        CostSpec(derivative_penalties=((1, 1.0), (2, 0.1))).validate(4, 2)
        bad = [
            CostSpec(length_weight=-1.0),
            CostSpec(derivative_penalties=((1, -1.0),)),
            CostSpec(derivative_penalties=((0, 1.0),)),
            CostSpec(derivative_penalties=((3, 1.0),)),
        ]
        for spec in bad:
            with self.assertRaises(CostSpecError):
                spec.validate(4, 2)
        with self.assertRaises(CostSpecError):
            CostSpec(derivative_penalties=((2, 1.0),)).validate(1, 2)


class TestEdgeConstraints(unittest.TestCase):
    def test_continuity(self):
        con = continuity(3, 1, 1)
        self.assertTrue(con.homogeneous)
        tail = np.array([0.0, 1.0, 2.0, 3.0])
        self.assertAlmostEqual(con.residual(tail, np.array([3.0, 4.0, 4.0, 4.0])), 0.0)
        self.assertAlmostEqual(con.residual(tail, np.array([3.0, 3.5, 4.0, 4.0])), 0.5)
        self.assertEqual(con.left.shape, (2, 4))

    def test_pin_start(self):
        con = pin_start(2, 2, np.array([1.0, 2.0]))
        self.assertFalse(con.homogeneous)
        head = np.array([1.0, 2.0, 5.0, 5.0, 6.0, 6.0])
        self.assertAlmostEqual(con.residual(np.zeros(0), head), 0.0)
        head[1] = 2.5
        self.assertAlmostEqual(con.residual(np.zeros(0), head), 0.5)

    def test_stationary(self):
        con = stationary(2, 2)
        point = np.array([1.0, 2.0] * 3)
        self.assertAlmostEqual(con.residual(point, np.zeros(0)), 0.0)
        point[4] = 3.0
        self.assertAlmostEqual(con.residual(point, np.zeros(0)), 2.0)


class TestGraph(unittest.TestCase):
    def test_edges(self):
        g = Gcs(2, 1, 0, CostSpec())
        for name in (SOURCE, TARGET):
            g.add_vertex(Vertex(name))
        g.add_vertex(Vertex("a", HPolytope.from_box([0, 0], [1, 1])))
        with self.assertRaises(ValueError):
            g.add_vertex(Vertex("a"))
        with self.assertRaises(ValueError):
            g.add_edge("a", "nowhere")
        with self.assertRaises(ValueError):
            g.add_edge("a", SOURCE)
        with self.assertRaises(ValueError):
            g.add_edge(TARGET, "a")
        g.add_edge(SOURCE, "a")
        g.add_edge("a", TARGET)
        self.assertEqual([e.v for e in g.out_edges(SOURCE)], ["a"])
        self.assertEqual([e.u for e in g.in_edges(TARGET)], ["a"])
        self.assertEqual(list(g.paths()), [[SOURCE, "a", TARGET]])
        self.assertEqual(g.dim, 4)
        self.assertFalse(g.costed(g.edges[(SOURCE, "a")]))
        self.assertTrue(g.costed(g.edges[("a", TARGET)]))

    def test_prune(self):
        g = Gcs(2, 1, 0, CostSpec())
        for name in (SOURCE, TARGET, "a", "dead", "orphan"):
            g.add_vertex(Vertex(name, None if name in (SOURCE, TARGET) else HPolytope.from_box([0, 0], [1, 1])))
        g.add_edge(SOURCE, "a")
        g.add_edge("a", TARGET)
        g.add_edge("a", "dead")
        g.add_edge("orphan", "a")
        pruned = g.prune()
        self.assertEqual(set(pruned.vertices), {SOURCE, "a", TARGET})
        self.assertEqual(set(pruned.edges), {(SOURCE, "a"), ("a", TARGET)})
        with self.assertRaises(UnsatisfiableError):
            pruned.without_target("a")

    def test_without_target(self):
        g = Gcs(2, 1, 0, CostSpec())
        box = HPolytope.from_box([0, 0], [1, 1])
        g.add_vertex(Vertex(SOURCE))
        g.add_vertex(Vertex(TARGET))
        for name in ("a", "b"):
            g.add_vertex(Vertex(name, box))
        g.add_edge(SOURCE, "a")
        g.add_edge("a", "b")
        g.add_edge("a", TARGET)
        g.add_edge("b", TARGET)
        rest = g.without_target("a")
        self.assertIn("a", rest.vertices)
        self.assertNotIn(("a", TARGET), rest.edges)
        self.assertEqual(list(rest.paths()), [[SOURCE, "a", "b", TARGET]])
        self.assertIn(("a", TARGET), g.edges)

    def test_unbounded_l2(self):
        regions = [LabeledRegion("half", HPolytope([[1.0, 0.0]], [1.0]), frozenset(["a"]))]
        ts = build_ts(regions, Q0)
        aut = ltlf_to_dfa(parse("F a"), ts.letters())
        with self.assertRaises(UnboundedVertexError):
            product(ts, aut, 2, 1, CostSpec(), Q0)
        g = product(ts, aut, 2, 1, CostSpec(Norm.L1), Q0)
        self.assertIn("half|q0", g.vertices)


class TestProduct(unittest.TestCase):
    def test_vertices(self):
        _, aut, g = corridor_product("F b")
        self.assertEqual(len(aut.states), 2)
        self.assertIn("left|q0", g.vertices)
        self.assertIn(("right|q0", TARGET), g.edges)
        self.assertNotIn(("left|q0", TARGET), g.edges)
        self.assertEqual([e.v for e in g.out_edges(SOURCE)], ["left|q0"])
        self.assertEqual(g.vertices["middle|q0"].region, 1)
        self.assertEqual((g.n, g.k, g.d), (2, 3, 1))

    def test_state_changes_after_the_label(self):
        "Leaving right|q0 the automaton has read {b}."
        _, aut, g = corridor_product("F b")
        heads = {e.v for e in g.out_edges("right|q0")}
        accepted = next(iter(aut.accepting))
        self.assertIn(f"middle|q{accepted}", heads)
        self.assertNotIn("middle|q0", heads)

    def test_no_self_loop(self):
        _, _, g = corridor_product("F b")
        for u, v in g.edges:
            self.assertNotEqual(u, v)

    def test_strict(self):
        _, aut, g = corridor_product("F b", strict=True)
        self.assertNotIn(("right|q0", TARGET), g.edges)
        accepted = next(iter(aut.accepting))
        self.assertIn((f"right|q{accepted}", TARGET), g.edges)

    def test_pin_and_stationary(self):
        _, _, g = corridor_product("F b", stationary_accepting=True)
        (pin,) = g.edges[(SOURCE, "left|q0")].constraints
        np.testing.assert_allclose(pin.rhs, Q0)
        (still,) = g.edges[("right|q0", TARGET)].constraints
        self.assertEqual(still.left.shape, (3 * 2, 4 * 2))
        _, _, loose = corridor_product("F b")
        self.assertEqual(loose.edges[("right|q0", TARGET)].constraints, [])

    def test_pruned(self):
        _, _, g = corridor_product("F (a & F b)")
        for name in g.vertices:
            self.assertTrue(name == SOURCE or g.in_edges(name), name)
            self.assertTrue(name == TARGET or g.out_edges(name), name)

    def test_unsatisfiable(self):
        with self.assertRaises(UnsatisfiableError) as ctx:
            corridor_product("F c")
        self.assertTrue(ctx.exception.graph_level)
        with self.assertRaises(UnsatisfiableError):
            corridor_product("F (a & b)")

    def test_order(self):
        with self.assertRaises(OrderError):
            corridor_product("F b", k=2, d=2)

    def test_alphabet(self):
        ts = build_ts(corridor(), Q0)
        aut = ltlf_to_dfa(parse("F b"), [[], ["b"]])
        with self.assertRaises(LetterError):
            product(ts, aut, 3, 1, CostSpec(), Q0)

    def test_dot(self):
        _, _, g = corridor_product("F b")
        dot = g.to_dot()
        self.assertIn('"source" [label="source", shape=box];', dot)
        self.assertIn('"right|q0" -> "target";', dot)


class TestLoopProblem(unittest.TestCase):
    def test_structure(self):
        regions = corridor()
        ts = build_ts(regions, Q0)
        aut = ltl_to_dba(parse("G F b"), ts.letters())
        g = product(ts, aut, 3, 1, CostSpec(), Q0, stationary_accepting=True)
        accepting = next(e.u for e in g.in_edges(TARGET))
        pin = np.tile(ts.region_of(g.vertices[accepting].region).polytope.chebyshev_center()[0], (4, 1))
        loop = loop_problem(g, ts, aut, accepting, pin)
        start, end = f"loop_start[{accepting}]", f"loop_end[{accepting}]"
        self.assertEqual((loop.source, loop.target), (start, end))
        self.assertNotIn(SOURCE, loop.vertices)
        self.assertNotIn(TARGET, loop.vertices)
        self.assertNotIn(accepting, loop.vertices)
        np.testing.assert_array_equal(loop.vertices[start].pin, pin)
        np.testing.assert_array_equal(loop.vertices[end].pin, pin)
        self.assertTrue(loop.out_edges(start))

        loose = loop_problem(g, ts, aut, accepting, pin, endpoints=True)
        end_pin = loose.vertices[end].pin
        self.assertTrue(np.isnan(end_pin[1:-1]).all())
        np.testing.assert_array_equal(end_pin[[0, -1]], pin[[0, -1]])


if __name__ == "__main__":
    unittest.main()
