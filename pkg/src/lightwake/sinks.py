"""Alarm outputs: buzzer-style melody synthesis and per-period chart export.

The melody sink renders 16-bit signed mono PCM square waves (the character
of a passive buzzer driven by a GPIO pin) and writes standard RIFF/WAVE
files. Melodies are plain text, one note per line as
``freq_hz:duration_ms`` with frequency 0 meaning a rest; blank lines and
``#`` comments are ignored.

The chart sink projects a session event log into one CSV per period (every
DeltaComputed event, timestamped in seconds within its period) plus a
key/value summary holding the per-period maxima, the learned thresholds,
and the alarm.
"""

from __future__ import annotations

import json
import math
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import (
    ALARM_FIRED,
    DELTA_COMPUTED,
    SessionEvent,
    THRESHOLDS_UPDATED,
    parse_event_line,
)
from .errors import InvalidMelody, MalformedLog
from .sources import format_seconds

NS_PER_S = 1_000_000_000

# 0.8 of full scale: loud but clear of clipping artifacts.
_AMPLITUDE = 26214

DEFAULT_SAMPLE_RATE = 16000
MIN_SAMPLE_RATE = 8000
MAX_SAMPLE_RATE = 48000


@dataclass(frozen=True, slots=True)
class Melody:
    """Ordered notes of (frequency_hz, duration_ms); frequency 0 is a rest."""

    notes: tuple[tuple[float, float], ...]
    name: str = "melody"

    def total_ms(self) -> float:
        return sum(duration for _, duration in self.notes)

    def validate(self) -> None:
        if not self.notes:
            raise InvalidMelody(f"melody {self.name!r} has no notes")
        for freq, duration in self.notes:
            if freq < 0 or not math.isfinite(freq):
                raise InvalidMelody(f"melody {self.name!r}: bad frequency {freq!r}")
            if duration <= 0 or not math.isfinite(duration):
                raise InvalidMelody(f"melody {self.name!r}: bad duration {duration!r} ms")


DEFAULT_ALARM_MELODY = Melody(
    notes=((660.0, 250.0), (880.0, 250.0), (1320.0, 500.0)),
    name="default-ascending",
)


def parse_melody(text: str, name: str = "melody") -> Melody:
    """Parse the ``freq_hz:duration_ms`` one-note-per-line format."""
    notes: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        freq_tok, sep, dur_tok = line.partition(":")
        if not sep:
            raise InvalidMelody(f"line {lineno}: expected freq_hz:duration_ms, got {raw!r}")
        try:
            freq = float(freq_tok)
            duration = float(dur_tok)
        except ValueError:
            raise InvalidMelody(f"line {lineno}: non-numeric note {raw!r}") from None
        notes.append((freq, duration))
    melody = Melody(notes=tuple(notes), name=name)
    melody.validate()
    return melody


def synthesize_melody(melody: Melody, sample_rate_hz: int = DEFAULT_SAMPLE_RATE) -> np.ndarray:
    """Render a melody as int16 mono PCM square-wave samples.

    Note boundaries are placed on the cumulative-duration grid, so the total
    length is within one frame of the melody's total duration regardless of
    how individual note lengths round.
    """
    melody.validate()
    if not (MIN_SAMPLE_RATE <= sample_rate_hz <= MAX_SAMPLE_RATE):
        raise InvalidMelody(
            f"sample rate {sample_rate_hz!r} Hz outside "
            f"{MIN_SAMPLE_RATE}..{MAX_SAMPLE_RATE}"
        )
    segments: list[np.ndarray] = []
    cumulative_ms = 0.0
    frame_cursor = 0
    for freq, duration in melody.notes:
        cumulative_ms += duration
        frame_end = int(cumulative_ms * sample_rate_hz / 1000.0 + 0.5)
        count = frame_end - frame_cursor
        frame_cursor = frame_end
        if count <= 0:
            continue
        if freq == 0.0:
            segments.append(np.zeros(count, dtype=np.int16))
            continue
        j = np.arange(count, dtype=np.float64)
        half_periods = np.floor(j * (2.0 * freq) / sample_rate_hz).astype(np.int64)
        wave_block = np.where(half_periods % 2 == 0, _AMPLITUDE, -_AMPLITUDE)
        segments.append(wave_block.astype(np.int16))
    if not segments:
        return np.zeros(0, dtype=np.int16)
    return np.concatenate(segments)


def write_wav(path: str | Path, pcm: np.ndarray, sample_rate_hz: int) -> None:
    """Write int16 mono PCM as a RIFF/WAVE file."""
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(sample_rate_hz)
        wav.writeframes(pcm.astype("<i2").tobytes())


def melody_to_wav(melody: Melody, path: str | Path,
                  sample_rate_hz: int = DEFAULT_SAMPLE_RATE) -> None:
    write_wav(path, synthesize_melody(melody, sample_rate_hz), sample_rate_hz)


# -- chart export -------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ChartSeries:
    """All motion deltas of one period, timestamped in seconds from its start."""

    period_index: int
    points: tuple[tuple[float, float], ...]  # (t_s within period, delta)


@dataclass(frozen=True, slots=True)
class LogSummary:
    sleep_ns: int
    period_ns: int
    n_periods: int
    period_maxima: dict[int, float]
    t_min: float | None
    t_max: float | None
    alarm_trigger: str | None
    alarm_t_ns: int | None
    alarm_delta: float | None


def read_event_log(path: str | Path) -> tuple[dict, list[SessionEvent]]:
    """Load a JSONL event log: (header record, events).

    A log cut off after any complete line is still readable (the events are
    simply a prefix); only syntactic corruption raises MalformedLog.
    """
    path = Path(path)
    events: list[SessionEvent] = []
    header: dict | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if header is None:
                try:
                    header = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedLog(f"{path}: line 1 is not JSON: {exc}") from None
                if not isinstance(header, dict) or "v" not in header:
                    raise MalformedLog(f"{path}: first record is not a version header")
                if header.get("v") != 1:
                    raise MalformedLog(f"{path}: unsupported log version {header.get('v')!r}")
                if "sleep_ns" not in header or "period_ns" not in header:
                    raise MalformedLog(f"{path}: header lacks sleep_ns/period_ns")
                continue
            try:
                events.append(parse_event_line(line))
            except (json.JSONDecodeError, ValueError, KeyError) as exc:
                raise MalformedLog(f"{path}: line {lineno}: {exc}") from None
    if header is None:
        raise MalformedLog(f"{path}: empty log (no version header)")
    return header, events


def _group_deltas(header: dict, events: list[SessionEvent]) -> list[list[tuple[int, float]]]:
    """Per-period buckets of (offset_ns within period, delta value)."""
    period_ns = header["period_ns"]
    sleep_ns = header["sleep_ns"]
    n_periods = math.ceil(sleep_ns / period_ns)
    buckets: list[list[tuple[int, float]]] = [[] for _ in range(n_periods)]
    for event in events:
        if event.kind != DELTA_COMPUTED:
            continue
        index = min(event.t_ns // period_ns, n_periods - 1)
        buckets[index].append((event.t_ns - index * period_ns, event.data["value"]))
    return buckets


def build_chart_series(header: dict, events: list[SessionEvent]) -> list[ChartSeries]:
    """Group DeltaComputed events into one series per period (all periods present)."""
    return [
        ChartSeries(
            period_index=k,
            points=tuple((rel_ns / NS_PER_S, value) for rel_ns, value in bucket),
        )
        for k, bucket in enumerate(_group_deltas(header, events))
    ]


def summarize_log(header: dict, events: list[SessionEvent]) -> LogSummary:
    period_ns = header["period_ns"]
    sleep_ns = header["sleep_ns"]
    n_periods = math.ceil(sleep_ns / period_ns)
    maxima: dict[int, float] = {}
    t_min = t_max = None
    alarm_trigger = None
    alarm_t_ns = None
    alarm_delta = None
    for event in events:
        if event.kind == DELTA_COMPUTED:
            index = min(event.t_ns // period_ns, n_periods - 1)
            value = event.data["value"]
            if index not in maxima or value > maxima[index]:
                maxima[index] = value
        elif event.kind == THRESHOLDS_UPDATED:
            t_min = event.data.get("t_min")
            t_max = event.data.get("t_max")
        elif event.kind == ALARM_FIRED:
            alarm_trigger = event.data.get("trigger")
            alarm_t_ns = event.t_ns
            alarm_delta = event.data.get("value")
    return LogSummary(
        sleep_ns=sleep_ns,
        period_ns=period_ns,
        n_periods=n_periods,
        period_maxima=maxima,
        t_min=t_min,
        t_max=t_max,
        alarm_trigger=alarm_trigger,
        alarm_t_ns=alarm_t_ns,
        alarm_delta=alarm_delta,
    )


def export_period_charts(log_path: str | Path, out_dir: str | Path) -> list[Path]:
    """Write period_<k>.csv for every period plus summary.csv; returns the paths.

    Chart rows are a lossless projection of the log's DeltaComputed events.
    """
    header, events = read_event_log(log_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for index, bucket in enumerate(_group_deltas(header, events)):
        path = out_dir / f"period_{index}.csv"
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("t_s,delta\n")
            for rel_ns, value in bucket:
                fh.write(f"{format_seconds(rel_ns)},{value!r}\n")
        written.append(path)

    summary = summarize_log(header, events)
    path = out_dir / "summary.csv"
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("key,value\n")
        for k in range(summary.n_periods):
            value = summary.period_maxima.get(k)
            fh.write(f"period_{k}_max,{'' if value is None else repr(value)}\n")
        fh.write(f"t_min,{'' if summary.t_min is None else repr(summary.t_min)}\n")
        fh.write(f"t_max,{'' if summary.t_max is None else repr(summary.t_max)}\n")
        fh.write(f"alarm_trigger,{summary.alarm_trigger or ''}\n")
        fh.write(
            "alarm_t_s,"
            f"{'' if summary.alarm_t_ns is None else format_seconds(summary.alarm_t_ns)}\n"
        )
        fh.write(
            "alarm_delta,"
            f"{'' if summary.alarm_delta is None else repr(summary.alarm_delta)}\n"
        )
    written.append(path)
    return written
