#!/usr/bin/env python

import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

from framework import TEST_SCENARIOS
from ltlgcs.bench import (
    STAGES,
    BenchRow,
    ScaleRow,
    bench,
    bench_markdown,
    cost_increases,
    scaling,
    write_bench_csv,
    write_scaling_csv,
)
from ltlgcs.error import ScenarioError
from ltlgcs.planner import Planner
from ltlgcs.scenario import synthetic

CORRIDOR = {
    "schema": "v1",
    "start": [0.5, 0.5],
    "formula": "F b",
    "regions": [
        {"name": "left", "labels": [], "box": {"lo": [0, 0], "hi": [1, 1]}},
        {"name": "right", "labels": ["b"], "box": {"lo": [1, 0], "hi": [2, 1]}},
    ],
    "options": {"order": 3, "smoothness": 1},
}


class TestBench(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def add(self, name, data):
        with open(os.path.join(self.tmp, name), "w", encoding="utf-8") as handle:
            json.dump(data, handle)

    def test_empty(self):
        self.assertEqual(bench(self.tmp), [])
        self.assertEqual(bench_markdown([]).count("\n"), 2)

    def test_not_a_directory(self):
        with self.assertRaises(ScenarioError):
            bench(os.path.join(self.tmp, "missing"))

    def test_rows(self):
        self.add("one.json", CORRIDOR)
        shutil.copy(os.path.join(TEST_SCENARIOS, "bad.json"), self.tmp)
        rows = bench(self.tmp, repetitions=2)
        self.assertEqual(len(rows), 2)
        bad, one = rows
        self.assertFalse(bad.ok)
        self.assertEqual(bad.error, "UnknownAtomError")
        self.assertTrue(one.ok)
        self.assertEqual(one.name, "one")
        self.assertEqual(set(one.timings), set(STAGES))
        self.assertTrue(all(seconds >= 0 for seconds in one.timings.values()))
        self.assertAlmostEqual(one.cost, 0.5, delta=0.05)

    def test_parallel(self):
        for i in range(3):
            self.add(f"s{i}.json", CORRIDOR)
        rows = bench(self.tmp, repetitions=1, parallel=True)
        self.assertEqual([row.name for row in rows], ["s0", "s1", "s2"])
        self.assertTrue(all(row.ok for row in rows))

    def test_overrides(self):
        self.add("one.json", CORRIDOR)
        (row,) = bench(self.tmp, repetitions=1, overrides={"order": 1})
        self.assertEqual(row.error, "OrderError")

    def test_unexpected_exception(self):
        "A bug in one scenario still leaves a row for every scenario."
        self.add("one.json", CORRIDOR)
        self.add("two.json", CORRIDOR)
        shutil.copy(os.path.join(TEST_SCENARIOS, "bad.json"), self.tmp)
        with mock.patch.object(Planner, "plan", side_effect=ValueError("boom")):
            with self.assertLogs("ltlgcs.bench", level="ERROR") as logs:
                rows = bench(self.tmp, repetitions=1)
        self.assertEqual(len(rows), 3)
        self.assertEqual([row.name for row in rows[1:]], ["one", "two"])
        self.assertEqual([row.error for row in rows], ["UnknownAtomError", "ValueError", "ValueError"])
        self.assertEqual(len(logs.records), 2)
        self.assertIn("failed (ValueError)", bench_markdown(rows))

    def test_unexpected_exception_parallel(self):
        for i in range(3):
            self.add(f"s{i}.json", CORRIDOR)
        with mock.patch.object(Planner, "plan", side_effect=RuntimeError("boom")):
            with self.assertLogs("ltlgcs.bench", level="ERROR"):
                rows = bench(self.tmp, repetitions=1, parallel=True)
        self.assertEqual(len(rows), 3)
        self.assertTrue(all(row.error == "RuntimeError" for row in rows))


class TestReports(unittest.TestCase):
    ROWS = [
        BenchRow("alpha", {"automaton": 0.001, "product": 0.0126, "solve": 1.5}, 2.0),
        BenchRow("beta", error="UnsatisfiableError"),
    ]

    def test_markdown(self):
        lines = bench_markdown(self.ROWS).splitlines()
        self.assertEqual(
            lines[0], "| Scenario | LTL to automaton (s) | Form GCS (s) | Solve (s) |"
        )
        self.assertEqual(lines[2], "| alpha | 0.001 | 0.013 | 1.500 |")
        self.assertEqual(lines[3], "| beta | failed (UnsatisfiableError) |  |  |")

    def test_csv(self):
        out = io.StringIO()
        write_bench_csv(self.ROWS, out)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], "scenario,automaton,product,solve,cost,status")
        self.assertEqual(lines[1], "alpha,0.001000,0.012600,1.500000,2.000000,ok")
        self.assertEqual(lines[2], "beta,,,,,failed: UnsatisfiableError")

    def test_scaling_csv(self):
        out = io.StringIO()
        write_scaling_csv([ScaleRow(2, error="OrderError"), ScaleRow(3, 8, 0.25, 1.0)], out)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[1], "2,,,,failed: OrderError")
        self.assertEqual(lines[2], "3,8,0.250000,1.000000,ok")

    def test_cost_increases(self):
        rows = [
            ScaleRow(4, cost=1.0),
            ScaleRow(2, cost=1.2),
            ScaleRow(3, error="SolverError"),
            ScaleRow(5, cost=1.1),
            ScaleRow(6, cost=1.1 + 1e-9),
        ]
        self.assertEqual(cost_increases(rows), [5])
        self.assertEqual(cost_increases([]), [])


class TestScaling(unittest.TestCase):
    def test_sweep(self):
        sc = synthetic(2, count=4)
        rows = scaling(sc, [1, 3, 4], {"smoothness": 1})
        self.assertEqual([row.order for row in rows], [1, 3, 4])
        self.assertEqual(rows[0].error, "OrderError")
        for row in rows[1:]:
            self.assertIsNone(row.error)
            self.assertGreater(row.cost, 0)
            self.assertEqual(row.control_points % (row.order + 1), 0)
            self.assertGreaterEqual(row.seconds, 0)

    def test_sweep_survives_unexpected_exception(self):
        sc = synthetic(2, count=4)
        with mock.patch.object(Planner, "plan", side_effect=ValueError("boom")):
            with self.assertLogs("ltlgcs.bench", level="ERROR"):
                rows = scaling(sc, [3, 4], {"smoothness": 1})
        self.assertEqual([(row.order, row.error) for row in rows], [(3, "ValueError"), (4, "ValueError")])


if __name__ == "__main__":
    unittest.main()
