"""Change events emitted by the architecture model.

Every mutation of the runtime model appends one or more events to the
owning architecture's queue.  Adaptation engines receive the drained
batch once per round; draining consumes the events, so each event is
observed exactly once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable


class ChangeEventKind(enum.Enum):
    """The complete vocabulary of model change notifications."""

    COMPONENT_LIFECYCLE_CHANGED = "ComponentLifecycleChanged"
    COMPONENT_ADDED = "ComponentAdded"
    COMPONENT_REMOVED = "ComponentRemoved"
    CONNECTOR_ADDED = "ConnectorAdded"
    CONNECTOR_REMOVED = "ConnectorRemoved"
    CONNECTOR_REROUTED = "ConnectorRerouted"
    EXCEPTION_OCCURRED = "ExceptionOccurred"
    PARAMETER_VALUE_CHANGED = "ParameterValueChanged"
    PERFORMANCE_STATS_UPDATED = "PerformanceStatsUpdated"
    MONITORED_PROPERTY_ADDED = "MonitoredPropertyAdded"
    MONITORED_PROPERTY_UPDATED = "MonitoredPropertyUpdated"


@dataclass(frozen=True)
class ChangeEvent:
    """One model change.

    ``timestamp`` is a tick of the architecture's logical clock, not a
    wall-clock instant, so event streams are reproducible run to run.
    ``subject_uid`` names the element the change happened to; removal
    events keep the uid of the element that no longer exists.  ``payload``
    carries kind-specific details (old/new values, endpoint uids) as
    plain strings and numbers so events stay meaningful after the
    subject is gone.
    """

    kind: ChangeEventKind
    timestamp: int
    subject_uid: str
    payload: dict[str, Any] = field(default_factory=dict)


class EventQueue:
    """Buffered change events with a single consumer.

    ``emit`` appends; ``drain`` hands over everything buffered so far and
    clears the buffer.  An optional tap observes every emission without
    consuming it (the simulation kernel uses this to write the event log
    while the adaptation engine remains the sole consumer).
    """

    def __init__(self) -> None:
        self._buffer: list[ChangeEvent] = []
        self._tap: Callable[[ChangeEvent], None] | None = None

    def __len__(self) -> int:
        return len(self._buffer)

    def emit(self, event: ChangeEvent) -> None:
        self._buffer.append(event)
        if self._tap is not None:
            self._tap(event)

    def drain(self) -> list[ChangeEvent]:
        """Return all buffered events, oldest first, and forget them."""
        drained = self._buffer
        self._buffer = []
        return drained

    def clear(self) -> None:
        """Discard buffered events without delivering them."""
        self._buffer = []

    def set_tap(self, tap: Callable[[ChangeEvent], None] | None) -> None:
        """Install an observer called on every emission.  Pass None to remove."""
        self._tap = tap
