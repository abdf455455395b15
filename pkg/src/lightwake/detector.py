"""Per-session threshold learning and the light-sleep alarm decision.

The session of length S is divided into fixed periods of length P (half
open: period k covers [k*P, (k+1)*P)). Every period except the last is a
learning period: the detector records the maximum motion delta of each one
in an array, keeps

    t_max = running maximum over every learning delta seen so far
            (raised immediately whenever a larger value arrives),
    t_min = minimum of the per-period maxima recorded so far,

and freezes both on entry to the final period. During the final period each
delta A is classified

    NREM  if t_min <= A <= t_max   (bounds inclusive)
    REM   otherwise

and the first NREM delta fires the alarm; if none arrives, the caller fires
it at the end of the sleep time via finalize().

Phase transitions are strictly forward:

    Learning(0) -> ... -> Learning(k) -> FinalPeriod -> AlarmFired

where AlarmFired is terminal. Period boundaries are timer events: they are
crossed either by the timestamp of an incoming delta or by an explicit
advance_to() from the session clock, so a source that goes quiet cannot
stall the state machine. A learning period that saw no deltas contributes
no entry to the maxima array (it does not drag t_min to zero).

A Detector instance is single-writer: advance_to/ingest/finalize must be
called from one logical stream in timestamp order. Instances are
independent, so any number of sessions may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidThresholds, OrderViolation, PhaseViolation, SessionTooShort
from .motion import MotionDelta


class SleepStage(Enum):
    NREM = "NREM"
    REM = "REM"


class AlarmTrigger(Enum):
    THRESHOLD_HIT = "ThresholdHit"
    SESSION_END = "SessionEnd"


class Phase(Enum):
    LEARNING = "Learning"
    FINAL_PERIOD = "FinalPeriod"
    ALARM_FIRED = "AlarmFired"


@dataclass(frozen=True, slots=True)
class ThresholdState:
    """Learned model: per-period maxima plus the derived band.

    t_max, when present, never decreases over a session; t_min always equals
    min(period_maxima). Both are None until the first learning delta or the
    first completed period, respectively.
    """

    period_maxima: tuple[float, ...]
    running_period_max: float | None
    t_min: float | None
    t_max: float | None


@dataclass(frozen=True, slots=True)
class DetectorOutcome:
    """Terminal result of a session: when and why the alarm fired.

    trigger_delta is the in-band delta value for THRESHOLD_HIT and None for
    SESSION_END.
    """

    alarm_time_ns: int
    trigger: AlarmTrigger
    trigger_delta: float | None
    final_thresholds: ThresholdState


@dataclass(frozen=True, slots=True)
class PeriodClose:
    """A learning period completed at boundary_ns = (index + 1) * P.

    period_max is None when the period contained no deltas. t_min/t_max are
    the band after the close; thresholds_changed marks whether the close
    moved it.
    """

    index: int
    period_max: float | None
    boundary_ns: int
    t_min: float | None
    t_max: float | None
    thresholds_changed: bool


@dataclass(frozen=True, slots=True)
class Advance:
    """Timer transitions performed while moving the detector clock forward."""

    closes: tuple[PeriodClose, ...]
    final_entry_ns: int | None


@dataclass(frozen=True, slots=True)
class DetectorDecision:
    """Outcome of ingesting one delta: alarm is None to continue, set to stop.

    The remaining fields expose what the ingest did, for event logging:
    boundary transitions it triggered, whether it raised t_max, and the
    stage assigned if it was classified in the final period.
    """

    advance: Advance
    threshold_raised: bool
    stage: SleepStage | None
    alarm: DetectorOutcome | None


@dataclass(frozen=True, slots=True)
class DetectorSnapshot:
    """Read-only view of the detector: phase plus a ThresholdState copy."""

    phase: Phase
    period_index: int | None
    trigger: AlarmTrigger | None
    thresholds: ThresholdState


_NO_ADVANCE = Advance(closes=(), final_entry_ns=None)


def classify(delta: MotionDelta, t_min: float, t_max: float) -> SleepStage:
    """Binary stage decision: NREM iff t_min <= delta.value <= t_max."""
    if t_min > t_max:
        raise InvalidThresholds(f"t_min {t_min!r} exceeds t_max {t_max!r}")
    if t_min <= delta.value <= t_max:
        return SleepStage.NREM
    return SleepStage.REM


class Detector:
    """Stateful session detector; see the module docstring for semantics."""

    def __init__(self, sleep_duration_ns: int, period_length_ns: int):
        if period_length_ns <= 0:
            raise SessionTooShort(f"period length must be positive, got {period_length_ns} ns")
        if sleep_duration_ns < 2 * period_length_ns:
            raise SessionTooShort(
                f"sleep duration {sleep_duration_ns} ns leaves no room for a learning "
                f"period plus the final one (need >= {2 * period_length_ns} ns)"
            )
        self.sleep_duration_ns = sleep_duration_ns
        self.period_length_ns = period_length_ns
        # Index of the last period; it may be shorter than P when the sleep
        # duration is not an exact multiple.
        self.final_period_index = math.ceil(sleep_duration_ns / period_length_ns) - 1

        self._phase = Phase.LEARNING
        self._period_index = 0
        self._trigger: AlarmTrigger | None = None
        self._period_maxima: list[float] = []
        self._running_period_max: float | None = None
        self._t_min: float | None = None
        self._t_max: float | None = None
        self._clock_ns = 0
        self._last_delta_ns = -1

    # -- observability ----------------------------------------------------

    def snapshot(self) -> DetectorSnapshot:
        """Copy of the current thresholds and phase; never mutates."""
        return DetectorSnapshot(
            phase=self._phase,
            period_index=self._period_index if self._phase is Phase.LEARNING else None,
            trigger=self._trigger,
            thresholds=ThresholdState(
                period_maxima=tuple(self._period_maxima),
                running_period_max=self._running_period_max,
                t_min=self._t_min,
                t_max=self._t_max,
            ),
        )

    # -- timer ------------------------------------------------------------

    def advance_to(self, t_ns: int) -> Advance:
        """Move the detector clock to t_ns, closing any periods it crosses.

        Idempotent for equal timestamps. Raises OrderViolation when t_ns
        moves backwards or beyond the sleep duration, PhaseViolation after
        the alarm has fired.
        """
        if self._phase is Phase.ALARM_FIRED:
            raise PhaseViolation("cannot advance a detector whose alarm already fired")
        if t_ns < self._clock_ns:
            raise OrderViolation(f"clock moved backwards: {t_ns} ns < {self._clock_ns} ns")
        if t_ns > self.sleep_duration_ns:
            raise OrderViolation(
                f"t={t_ns} ns is beyond the session end at {self.sleep_duration_ns} ns"
            )
        self._clock_ns = t_ns
        if self._phase is Phase.FINAL_PERIOD:
            return _NO_ADVANCE

        target_index = min(t_ns // self.period_length_ns, self.final_period_index)
        closes: list[PeriodClose] = []
        final_entry_ns: int | None = None
        while self._period_index < target_index:
            closes.append(self._close_current_period())
            self._period_index += 1
        if self._period_index == self.final_period_index:
            self._phase = Phase.FINAL_PERIOD
            self._running_period_max = None
            final_entry_ns = self.final_period_index * self.period_length_ns
        if not closes and final_entry_ns is None:
            return _NO_ADVANCE
        return Advance(closes=tuple(closes), final_entry_ns=final_entry_ns)

    def _close_current_period(self) -> PeriodClose:
        period_max = self._running_period_max
        self._running_period_max = None
        changed = False
        if period_max is not None:
            self._period_maxima.append(period_max)
            new_t_min = min(self._period_maxima)
            changed = new_t_min != self._t_min
            self._t_min = new_t_min
        return PeriodClose(
            index=self._period_index,
            period_max=period_max,
            boundary_ns=(self._period_index + 1) * self.period_length_ns,
            t_min=self._t_min,
            t_max=self._t_max,
            thresholds_changed=changed,
        )

    # -- stream -----------------------------------------------------------

    def ingest(self, delta: MotionDelta) -> DetectorDecision:
        """Feed one motion delta; returns the alarm decision for it.

        Learning phase: updates the running period max and raises t_max.
        Final phase: classifies the delta against the frozen band and fires
        the alarm on the first NREM hit. Timestamps must be strictly
        increasing and inside [0, sleep_duration).
        """
        if self._phase is Phase.ALARM_FIRED:
            raise PhaseViolation("detector already fired; no further deltas may be ingested")
        if delta.t_ns <= self._last_delta_ns:
            raise OrderViolation(
                f"delta at t={delta.t_ns} ns does not advance past {self._last_delta_ns} ns"
            )
        if delta.t_ns >= self.sleep_duration_ns:
            raise OrderViolation(
                f"delta at t={delta.t_ns} ns lies beyond the session window "
                f"[0, {self.sleep_duration_ns}) ns"
            )
        advance = self.advance_to(delta.t_ns)
        self._last_delta_ns = delta.t_ns

        if self._phase is Phase.LEARNING:
            raised = False
            if self._running_period_max is None or delta.value > self._running_period_max:
                self._running_period_max = delta.value
            if self._t_max is None or delta.value > self._t_max:
                self._t_max = delta.value
                raised = True
            return DetectorDecision(advance=advance, threshold_raised=raised,
                                    stage=None, alarm=None)

        # Final period: thresholds are frozen. With no learning data at all
        # the band is empty and nothing can hit it.
        if self._t_min is None or self._t_max is None:
            return DetectorDecision(advance=advance, threshold_raised=False,
                                    stage=None, alarm=None)
        stage = classify(delta, self._t_min, self._t_max)
        if stage is SleepStage.REM:
            return DetectorDecision(advance=advance, threshold_raised=False,
                                    stage=stage, alarm=None)
        self._phase = Phase.ALARM_FIRED
        self._trigger = AlarmTrigger.THRESHOLD_HIT
        outcome = DetectorOutcome(
            alarm_time_ns=delta.t_ns,
            trigger=AlarmTrigger.THRESHOLD_HIT,
            trigger_delta=delta.value,
            final_thresholds=self.snapshot().thresholds,
        )
        return DetectorDecision(advance=advance, threshold_raised=False,
                                stage=stage, alarm=outcome)

    def finalize(self, session_end_ns: int) -> DetectorOutcome:
        """Fire the fallback alarm at the end of the sleep time.

        Only valid in the final period (advance_to the session end first if
        the source dried up early); raises PhaseViolation during learning or
        after the alarm fired.
        """
        if self._phase is Phase.LEARNING:
            raise PhaseViolation(
                f"cannot finalize while still learning (period {self._period_index}); "
                f"advance_to the session end first"
            )
        if self._phase is Phase.ALARM_FIRED:
            raise PhaseViolation("alarm already fired; finalize is not applicable")
        if session_end_ns > self.sleep_duration_ns or session_end_ns < self._clock_ns:
            raise OrderViolation(
                f"session end {session_end_ns} ns outside [{self._clock_ns}, "
                f"{self.sleep_duration_ns}] ns"
            )
        self._phase = Phase.ALARM_FIRED
        self._trigger = AlarmTrigger.SESSION_END
        return DetectorOutcome(
            alarm_time_ns=session_end_ns,
            trigger=AlarmTrigger.SESSION_END,
            trigger_delta=None,
            final_thresholds=self.snapshot().thresholds,
        )
