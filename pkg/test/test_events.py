#!/usr/bin/env python

import unittest

from ltlgcs.events import EventEmitter, on, timed
from ltlgcs.planner import Planner


class Progress(EventEmitter):
    def __init__(self):
        EventEmitter.__init__(self)
        self.rounds = []
        self.retries = 0
        self.on("round", self.record_round)
        self.once("loop_retry", self.record_retry)

    def record_round(self, attempt, path, cost):
        self.rounds.append((attempt, cost))

    def record_retry(self, vertex):
        self.retries += 1


class TestEventEmitter(unittest.TestCase):
    def setUp(self):
        self.progress = Progress()

    def test_on(self):
        self.progress.emit("round", 0, ["s", "t"], 1.0)
        self.progress.emit("round", 1, ["s", "u", "t"], None)
        self.assertEqual(self.progress.rounds, [(0, 1.0), (1, None)])

    def test_once(self):
        self.progress.emit("loop_retry", "hall|q1")
        self.progress.emit("loop_retry", "hall|q1")
        self.assertEqual(self.progress.retries, 1)
        self.assertEqual(self.progress.listeners("loop_retry"), [])

    def test_nobody_listening(self):
        self.progress.emit("stage", "solve", 0.1)

    def test_remove_listener(self):
        self.progress.remove_listener("round", self.progress.record_round)
        self.progress.emit("round", 0, [], 0.0)
        self.assertEqual(self.progress.rounds, [])

    def test_remove_during_emit(self):
        seen = []

        def first(*args):
            seen.append("first")
            self.progress.remove_listener("stage", second)

        def second(*args):
            seen.append("second")

        self.progress.on("stage", first)
        self.progress.on("stage", second)
        self.progress.emit("stage", "product", 0.0)
        self.progress.emit("stage", "product", 0.0)
        self.assertEqual(seen, ["first", "second", "first"])

    def test_remove_listeners(self):
        self.progress.remove_listeners("round")
        self.progress.emit("round", 0, [], 0.0)
        self.progress.emit("loop_retry", "v")
        self.assertEqual((self.progress.rounds, self.progress.retries), ([], 1))
        self.progress.once("loop_retry", self.progress.record_retry)
        self.progress.remove_listeners()
        self.progress.emit("loop_retry", "v")
        self.assertEqual(self.progress.retries, 1)

    def test_sink(self):
        class Sink:
            def __init__(self):
                self.stages = []

            def stage(self, name, seconds):
                self.stages.append(name)

        sink = Sink()
        self.progress.sink(sink)
        self.progress.emit("stage", "automaton", 0.0)
        self.progress.on("stage", lambda name, seconds: None)
        self.progress.emit("stage", "solve", 0.0)
        self.assertEqual(sink.stages, ["automaton"])

    def test_documented(self):
        for name in ("on", "once", "remove_listener", "emit"):
            self.assertTrue(getattr(EventEmitter, name).__doc__, name)

    def test_decorator(self):
        calls = []

        @on(self.progress)
        def stage(name, seconds):
            calls.append(name)

        @on(self.progress, "loop_retry")
        def retried(vertex):
            calls.append(vertex)

        self.progress.emit("stage", "product", 0.0)
        self.progress.emit("loop_retry", "room|q2")
        self.assertEqual(calls, ["product", "room|q2"])


class TestTimed(unittest.TestCase):
    def test_accumulates(self):
        emitter = EventEmitter()
        stages = []
        emitter.on("stage", lambda name, seconds: stages.append((name, seconds)))
        timings = {}
        with timed(emitter, "solve", timings):
            pass
        with timed(emitter, "solve", timings):
            pass
        self.assertEqual([name for name, _ in stages], ["solve", "solve"])
        self.assertAlmostEqual(timings["solve"], stages[0][1] + stages[1][1])

    def test_emits_on_error(self):
        emitter = EventEmitter()
        stages = []
        emitter.on("stage", lambda name, seconds: stages.append(name))
        timings = {}
        with self.assertRaises(KeyError):
            with timed(emitter, "product", timings):
                raise KeyError("a")
        self.assertEqual(stages, ["product"])
        self.assertIn("product", timings)

    def test_planner_is_an_emitter(self):
        self.assertIsInstance(Planner(), EventEmitter)


if __name__ == "__main__":
    unittest.main()
