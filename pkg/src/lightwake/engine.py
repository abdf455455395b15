"""Session orchestration: source -> normalize -> delta -> detector, on a virtual clock.

run_session() executes one full sleep session. All times in the pipeline
and the event log are *virtual* nanoseconds from session start; wall time
only enters as pacing. At speed 1.0 samples are delivered in real time, at
speed s the wall delay between deliveries is the virtual gap divided by s,
and at speed 0 delivery is immediate. Logs are therefore byte-identical
across speeds.

The event log is JSON Lines: a version header record first
(``{"v":1,"sleep_ns":...,"period_ns":...}``), then one event per line with
``t_ns`` (int), ``kind`` (str), and kind-specific fields. Events are
flushed line by line, so a truncated log is always a prefix of the full
one.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, IO, Iterable, Iterator

from .detector import Advance, Detector, DetectorOutcome
from .errors import ConfigInvalid, DegenerateSample, LightwakeError, OrderViolation, SourceFailed
from .motion import NormalizedSample, RawSample, manhattan_delta, normalize

logger = logging.getLogger(__name__)

NS_PER_S = 1_000_000_000
MINUTE_NS = 60 * NS_PER_S
HOUR_NS = 3600 * NS_PER_S

LOG_VERSION = 1

SAMPLE_ACCEPTED = "SampleAccepted"
SAMPLE_SKIPPED = "SampleSkipped"
DELTA_COMPUTED = "DeltaComputed"
PERIOD_CLOSED = "PeriodClosed"
THRESHOLDS_UPDATED = "ThresholdsUpdated"
FINAL_PERIOD_ENTERED = "FinalPeriodEntered"
STAGE_CLASSIFIED = "StageClassified"
ALARM_FIRED = "AlarmFired"
SESSION_ENDED = "SessionEnded"


@dataclass(frozen=True, slots=True)
class SessionConfig:
    """Session parameters: duration and period in ns, plus the clock speed."""

    sleep_duration_ns: int
    period_length_ns: int = HOUR_NS
    speed: float = 0.0

    def validate(self) -> None:
        if self.period_length_ns <= 0:
            raise ConfigInvalid("period length must be positive")
        if self.sleep_duration_ns < 2 * self.period_length_ns:
            raise ConfigInvalid(
                "sleep duration must cover at least one learning period plus the "
                f"final one ({self.sleep_duration_ns} ns < 2 * {self.period_length_ns} ns)"
            )
        if not (self.speed >= 0.0):
            raise ConfigInvalid(f"speed must be >= 0, got {self.speed!r}")


@dataclass(frozen=True, slots=True)
class SessionEvent:
    """One audit-log record: virtual timestamp, kind, kind-specific fields."""

    t_ns: int
    kind: str
    data: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"t_ns": self.t_ns, "kind": self.kind, **self.data},
                          separators=(",", ":"))


@dataclass(frozen=True, slots=True)
class SessionResult:
    outcome: DetectorOutcome
    events: list[SessionEvent]


class EventLog:
    """Collects SessionEvents and, when given a sink, flushes each line eagerly."""

    def __init__(self, config: SessionConfig, sink: IO[str] | None = None):
        self.events: list[SessionEvent] = []
        self._sink = sink
        if sink is not None:
            header = {
                "v": LOG_VERSION,
                "sleep_ns": config.sleep_duration_ns,
                "period_ns": config.period_length_ns,
            }
            sink.write(json.dumps(header, separators=(",", ":")) + "\n")
            sink.flush()

    def emit(self, t_ns: int, kind: str, **data: Any) -> None:
        event = SessionEvent(t_ns, kind, data)
        self.events.append(event)
        if self._sink is not None:
            self._sink.write(event.to_json() + "\n")
            self._sink.flush()


class VirtualClock:
    """Maps virtual session time onto wall time at a fixed speed ratio.

    speed 0 never sleeps; speed s > 0 holds delivery of the event at
    virtual time t until wall time start + t/s.
    """

    def __init__(self, speed: float):
        self.speed = speed
        self._wall_start: float | None = None

    def start(self) -> None:
        self._wall_start = time.monotonic()

    def wait_until(self, t_ns: int) -> None:
        if self.speed <= 0.0:
            return
        if self._wall_start is None:
            self.start()
        target = self._wall_start + (t_ns / NS_PER_S) / self.speed
        delay = target - time.monotonic()
        if delay > 0:
            time.sleep(delay)


def _emit_advance(log: EventLog, advance: Advance) -> None:
    for close in advance.closes:
        log.emit(close.boundary_ns, PERIOD_CLOSED,
                 index=close.index, period_max=close.period_max)
        if close.thresholds_changed:
            log.emit(close.boundary_ns, THRESHOLDS_UPDATED,
                     t_min=close.t_min, t_max=close.t_max)
    if advance.final_entry_ns is not None:
        log.emit(advance.final_entry_ns, FINAL_PERIOD_ENTERED)


def run_session(
    config: SessionConfig,
    source: Iterable[RawSample],
    *,
    event_sink: IO[str] | None = None,
    on_alarm: Callable[[DetectorOutcome], None] | None = None,
) -> SessionResult:
    """Run one sleep session over a sample source and return its outcome.

    The pipeline normalizes each sample, computes the Manhattan delta
    against the previous one, and feeds the detector. On a threshold hit
    the source is stopped immediately; if the stream or the session ends
    without one, the virtual clock fast-forwards and the fallback alarm
    fires at exactly the configured sleep duration. The alarm callback is
    invoked exactly once per session.

    Raises ConfigInvalid before any work, and SourceFailed if the source
    errors mid-session (the partial event log is already flushed).
    """
    config.validate()
    detector = Detector(config.sleep_duration_ns, config.period_length_ns)
    log = EventLog(config, event_sink)
    clock = VirtualClock(config.speed)
    clock.start()

    outcome: DetectorOutcome | None = None
    prev: NormalizedSample | None = None
    iterator: Iterator[RawSample] = iter(source)
    try:
        while True:
            try:
                sample = next(iterator)
            except StopIteration:
                break
            except (LightwakeError, OSError) as exc:
                raise SourceFailed(f"sample source failed: {exc}") from exc
            if sample.t_ns >= config.sleep_duration_ns:
                break
            clock.wait_until(sample.t_ns)
            _emit_advance(log, detector.advance_to(sample.t_ns))
            try:
                norm = normalize(sample)
            except DegenerateSample as exc:
                logger.warning("skipping sample at t=%d ns: %s", sample.t_ns, exc)
                log.emit(sample.t_ns, SAMPLE_SKIPPED, reason="degenerate")
                continue
            log.emit(sample.t_ns, SAMPLE_ACCEPTED)
            if prev is not None:
                try:
                    delta = manhattan_delta(prev, norm)
                except OrderViolation as exc:
                    raise SourceFailed(f"source yielded non-monotone timestamps: {exc}") from exc
                log.emit(delta.t_ns, DELTA_COMPUTED, value=delta.value)
                decision = detector.ingest(delta)
                _emit_advance(log, decision.advance)
                if decision.threshold_raised:
                    state = detector.snapshot().thresholds
                    log.emit(delta.t_ns, THRESHOLDS_UPDATED,
                             t_min=state.t_min, t_max=state.t_max)
                if decision.stage is not None:
                    log.emit(delta.t_ns, STAGE_CLASSIFIED,
                             stage=decision.stage.value, value=delta.value)
                if decision.alarm is not None:
                    outcome = decision.alarm
                    log.emit(delta.t_ns, ALARM_FIRED,
                             trigger=outcome.trigger.value, value=outcome.trigger_delta)
                    break
            prev = norm
    finally:
        closer = getattr(iterator, "close", None)
        if closer is None:
            closer = getattr(source, "close", None)
        if closer is not None:
            closer()

    if outcome is None:
        # Source exhausted (or session window passed) without a hit: jump the
        # virtual clock to the end of the sleep time and fire the fallback.
        _emit_advance(log, detector.advance_to(config.sleep_duration_ns))
        outcome = detector.finalize(config.sleep_duration_ns)
        log.emit(config.sleep_duration_ns, ALARM_FIRED, trigger=outcome.trigger.value)
    log.emit(outcome.alarm_time_ns, SESSION_ENDED)

    if on_alarm is not None:
        on_alarm(outcome)
    return SessionResult(outcome=outcome, events=log.events)


def parse_event_line(line: str) -> SessionEvent:
    """Decode one event-log line back into a SessionEvent (not the header)."""
    record = json.loads(line)
    t_ns = record.pop("t_ns")
    kind = record.pop("kind")
    if not isinstance(t_ns, int) or not isinstance(kind, str):
        raise ValueError(f"not an event record: {line!r}")
    return SessionEvent(t_ns=t_ns, kind=kind, data=record)
