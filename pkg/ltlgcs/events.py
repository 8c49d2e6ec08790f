#!/usr/bin/env python

"""
Progress events for long-running planning work.

* EventEmitter - listeners keyed by event name, with an optional sink.
* on - a decorator for making functions listen to an emitter.
* timed - a context manager that times a planning stage and emits `stage`.
"""

from collections import defaultdict
from contextlib import contextmanager
import time
from typing import Any, Callable, Dict, Iterator, List, Optional


class EventEmitter:
    """
    Calls listeners when an event is emitted. When nothing listens for an
    event, the same-named method of the sink (if any) is called instead.
    """

    def __init__(self) -> None:
        self.__events: Dict[str, List[Callable]] = defaultdict(list)
        self.__sink: object = None

    def on(self, event: str, listener: Callable) -> None:
        "Call listener with the arguments of every `event`."
        self.__events[event].append(listener)

    def once(self, event: str, listener: Callable) -> None:
        "Call listener for the next `event` only."
        def mycall(*args: Any) -> None:
            self.remove_listener(event, mycall)
            listener(*args)

        mycall.__name__ = listener.__name__
        self.on(event, mycall)

    def remove_listener(self, event: str, listener: Callable) -> None:
        "Stop calling listener for `event`."
        self.__events.get(event, [listener]).remove(listener)

    def remove_listeners(self, *events: str) -> None:
        if events:
            for event in events:
                self.__events[event] = []
        else:
            self.__events = defaultdict(list)

    def listeners(self, event: str) -> List[Callable]:
        return self.__events.get(event, [])

    def emit(self, event: str, *args: Any) -> None:
        "Call the listeners for `event`, or the sink if there are none."
        listeners = self.__events.get(event, [])
        if listeners:
            for listener in list(listeners):
                listener(*args)
        else:
            sink_event = getattr(self.__sink, event, None)
            if sink_event:
                sink_event(*args)

    def sink(self, sink: object) -> None:
        self.__sink = sink


def on(obj: EventEmitter, event: Optional[str] = None) -> Callable:
    """
    Decorator to call a function when an object emits
    the specified event (by default, the function's name).
    """

    def wrap(funk: Callable) -> Callable:
        obj.on(event or funk.__name__, funk)
        return funk

    return wrap


@contextmanager
def timed(
    emitter: EventEmitter, stage: str, timings: Dict[str, float]
) -> Iterator[None]:
    """
    Time the enclosed block, add the elapsed seconds to timings[stage] and
    emit `stage` with (stage, seconds).
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        timings[stage] = timings.get(stage, 0.0) + elapsed
        emitter.emit("stage", stage, elapsed)
