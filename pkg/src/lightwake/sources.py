"""Producers of raw acceleration sample streams.

Three interchangeable sources feed a session: replay of a recorded trace
file, a seeded synthetic sleep-night generator, and a TCP line-protocol
listener standing in for a body-worn IMU.

Trace file format (UTF-8 CSV):

    # rate_hz=4.0
    # label=free text
    t_s,ax_g,ay_g,az_g
    0.000000000,0.0123,-0.0021,0.9987
    ...

Optional ``#``-prefixed ``key=value`` comment lines may precede the header;
``rate_hz`` and ``label`` are recognized. ``t_s`` is seconds from session
start and is converted to integer nanoseconds by rounding half-up (decimal
arithmetic, so the text value is authoritative). Timestamps must be
strictly increasing and every component must stay within the sensor's
+/-5 g range.

Live line protocol (TCP): newline-delimited ASCII, one sample per line as
four space-separated decimal fields ``t_s ax ay az``. The server accepts a
single client, replies nothing, and drops the connection on the first
invalid line. Closing the connection ends the stream.

The synthetic generator is a fixture factory, not a physiological model:
a gravity baseline plus Gaussian noise, with randomized movement bursts
arriving as a Poisson process whose rate switches between a light-sleep
rate and a deep/REM rate over a fixed cycle schedule (movement clusters
around light sleep). It draws from numpy's PCG64 generator, so a fixed
seed reproduces the identical trace on any platform.
"""

from __future__ import annotations

import logging
import math
import socket
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation, ROUND_HALF_UP
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import (
    BindError,
    InvalidParams,
    OrderError,
    ParseError,
    ProtocolError,
    RangeError,
)
from .motion import RawSample, SENSOR_RANGE_G

logger = logging.getLogger(__name__)

NS_PER_S = 1_000_000_000
TRACE_HEADER_LINE = "t_s,ax_g,ay_g,az_g"

_NS_QUANTUM = Decimal(NS_PER_S)


@dataclass(frozen=True, slots=True)
class TraceHeader:
    """Trace metadata: sampling rate (1..250 Hz), covered duration, label."""

    sample_rate_hz: float = 4.0
    duration_ns: int = 0
    label: str = ""

    def validate(self) -> None:
        if not (1.0 <= self.sample_rate_hz <= 250.0):
            raise InvalidParams(
                f"sample rate {self.sample_rate_hz!r} Hz outside the sensor's 1..250 Hz envelope"
            )
        if self.duration_ns < 0:
            raise InvalidParams("duration must be non-negative")


@dataclass(frozen=True, slots=True)
class SleepModelParams:
    """Knobs of the synthetic night: cycle layout, noise, and burst process.

    Movement bursts arrive at burst_rate_light events/min while the schedule
    is in light sleep and burst_rate_deep otherwise (deep and REM are both
    quiet). Each burst lasts 1..5 s with a per-axis offset drawn uniformly
    from +/-burst_amplitude g.
    """

    cycle_length_ns: int = 90 * 60 * NS_PER_S
    rem_fraction: float = 0.20
    quiet_noise_sigma: float = 0.003
    burst_rate_light: float = 3.0
    burst_rate_deep: float = 0.1
    burst_amplitude: float = 0.4
    rng_seed: int = 0

    def validate(self) -> None:
        if self.cycle_length_ns <= 0:
            raise InvalidParams("cycle_length_ns must be positive")
        if not (0.0 < self.rem_fraction < 1.0):
            raise InvalidParams(f"rem_fraction {self.rem_fraction!r} outside (0, 1)")
        if self.quiet_noise_sigma < 0.0:
            raise InvalidParams("quiet_noise_sigma must be non-negative")
        if self.burst_rate_light < 0.0 or self.burst_rate_deep < 0.0:
            raise InvalidParams("burst rates must be non-negative")
        # Light sleep must be at least as restless as deep sleep; equal rates
        # are allowed so both can be zeroed for quiescent fixtures.
        if self.burst_rate_deep > self.burst_rate_light:
            raise InvalidParams(
                f"burst_rate_deep {self.burst_rate_deep!r} exceeds "
                f"burst_rate_light {self.burst_rate_light!r}"
            )
        if self.burst_amplitude < 0.0:
            raise InvalidParams("burst_amplitude must be non-negative")


def seconds_to_ns(token: str) -> int:
    """Convert a decimal seconds field to integer nanoseconds, rounding half-up.

    Decimal arithmetic on the text keeps the conversion exact and
    platform-independent; raises ValueError on anything non-finite.
    """
    try:
        value = Decimal(token)
    except InvalidOperation as exc:
        raise ValueError(f"not a decimal number: {token!r}") from exc
    if not value.is_finite():
        raise ValueError(f"non-finite time value: {token!r}")
    return int((value * _NS_QUANTUM).to_integral_value(rounding=ROUND_HALF_UP))


class _FieldError(ValueError):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind  # "parse" or "range"


def _fields_to_sample(t_tok: str, x_tok: str, y_tok: str, z_tok: str) -> RawSample:
    try:
        t_ns = seconds_to_ns(t_tok)
    except ValueError as exc:
        raise _FieldError("parse", f"bad time field {t_tok!r}: {exc}") from exc
    if t_ns < 0:
        raise _FieldError("parse", f"negative timestamp {t_tok!r}")
    comps = []
    for tok in (x_tok, y_tok, z_tok):
        try:
            value = float(tok)
        except ValueError as exc:
            raise _FieldError("parse", f"bad acceleration field {tok!r}") from exc
        if not math.isfinite(value):
            raise _FieldError("parse", f"non-finite acceleration field {tok!r}")
        if abs(value) > SENSOR_RANGE_G:
            raise _FieldError(
                "range", f"acceleration {tok!r} exceeds +/-{SENSOR_RANGE_G:g} g"
            )
        comps.append(value)
    return RawSample(t_ns, comps[0], comps[1], comps[2])


# -- trace files ------------------------------------------------------------

def read_trace(path: str | Path) -> tuple[TraceHeader, list[RawSample]]:
    """Parse a trace CSV into its header and time-ordered samples.

    Raises ParseError (with the offending line number), OrderError on
    non-monotone timestamps, or RangeError on out-of-range accelerations.
    """
    path = Path(path)
    rate = 4.0
    label = ""
    samples: list[RawSample] = []
    prev_t: int | None = None
    seen_header = False
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw_line in enumerate(fh, start=1):
            line = raw_line.rstrip("\n").rstrip("\r")
            if not seen_header:
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    key = key.strip()
                    if key == "rate_hz":
                        try:
                            rate = float(value)
                        except ValueError:
                            raise ParseError(
                                f"line {lineno}: bad rate_hz value {value!r}", lineno
                            ) from None
                        if not (1.0 <= rate <= 250.0):
                            raise ParseError(
                                f"line {lineno}: rate_hz {rate!r} outside 1..250", lineno
                            )
                    elif key == "label":
                        label = value
                    # Unknown keys are ignored for forward compatibility.
                    continue
                if line.strip() != TRACE_HEADER_LINE:
                    raise ParseError(
                        f"line {lineno}: expected header {TRACE_HEADER_LINE!r}, "
                        f"got {line!r}",
                        lineno,
                    )
                seen_header = True
                continue
            if not line.strip():
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != 4:
                raise ParseError(
                    f"line {lineno}: expected 4 comma-separated fields, got {len(fields)}",
                    lineno,
                )
            try:
                sample = _fields_to_sample(*fields)
            except _FieldError as exc:
                if exc.kind == "range":
                    raise RangeError(f"line {lineno}: {exc}") from None
                raise ParseError(f"line {lineno}: {exc}", lineno) from None
            if prev_t is not None and sample.t_ns <= prev_t:
                raise OrderError(
                    f"line {lineno}: timestamp {sample.t_ns} ns does not increase "
                    f"past {prev_t} ns"
                )
            prev_t = sample.t_ns
            samples.append(sample)
    if not seen_header:
        raise ParseError(f"{path}: missing {TRACE_HEADER_LINE!r} header line", None)
    header = TraceHeader(
        sample_rate_hz=rate,
        duration_ns=samples[-1].t_ns if samples else 0,
        label=label,
    )
    return header, samples


def format_seconds(t_ns: int) -> str:
    """Canonical trace formatting of a nanosecond timestamp: fixed 9 decimals."""
    return f"{t_ns / NS_PER_S:.9f}"


def write_trace(path: str | Path, header: TraceHeader, samples: list[RawSample]) -> None:
    """Write samples in the canonical trace CSV format (see module docstring).

    Components are written with shortest round-trip float formatting, so
    read_trace(write_trace(...)) reproduces the samples bit for bit.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# rate_hz={header.sample_rate_hz!r}\n")
        if header.label:
            fh.write(f"# label={header.label}\n")
        fh.write(TRACE_HEADER_LINE + "\n")
        for s in samples:
            fh.write(f"{format_seconds(s.t_ns)},{s.ax!r},{s.ay!r},{s.az!r}\n")


# -- synthetic generator -----------------------------------------------------

_DEEP, _LIGHT, _REM = "deep", "light", "rem"


def stage_schedule(params: SleepModelParams, duration_ns: int) -> list[tuple[int, int, str]]:
    """Piecewise-constant stage segments (start_ns, end_ns, stage) over the night.

    Each cycle runs deep -> light -> REM, with REM occupying rem_fraction of
    the cycle and the remainder split evenly between deep and light.
    """
    nrem_fraction = 1.0 - params.rem_fraction
    cycle = params.cycle_length_ns
    deep_end = int(cycle * nrem_fraction / 2.0)
    light_end = int(cycle * nrem_fraction)
    segments: list[tuple[int, int, str]] = []
    cycle_start = 0
    while cycle_start < duration_ns:
        for offset, end, stage in (
            (0, deep_end, _DEEP),
            (deep_end, light_end, _LIGHT),
            (light_end, cycle, _REM),
        ):
            seg_start = cycle_start + offset
            seg_end = min(cycle_start + end, duration_ns)
            if seg_start >= duration_ns:
                break
            if seg_end > seg_start:
                segments.append((seg_start, seg_end, stage))
        cycle_start += cycle
    return segments


def generate_trace(params: SleepModelParams, header: TraceHeader) -> list[RawSample]:
    """Synthesize a night of accelerometer samples; deterministic per seed."""
    params.validate()
    header.validate()

    rate = header.sample_rate_hz
    ns_per_sample = NS_PER_S / rate
    n = int(header.duration_ns * rate / NS_PER_S)
    while int(n * ns_per_sample + 0.5) < header.duration_ns:
        n += 1
    while n > 0 and int((n - 1) * ns_per_sample + 0.5) >= header.duration_ns:
        n -= 1
    if n == 0:
        return []
    t_ns = [int(i * ns_per_sample + 0.5) for i in range(n)]
    t_s = np.asarray(t_ns, dtype=np.float64) / NS_PER_S

    rng = np.random.default_rng(params.rng_seed)
    acc = np.zeros((n, 3), dtype=np.float64)
    acc[:, 2] = 1.0  # gravity baseline
    acc += rng.normal(0.0, params.quiet_noise_sigma, size=(n, 3))

    for seg_start, seg_end, stage in stage_schedule(params, header.duration_ns):
        rate_per_s = (
            params.burst_rate_light if stage == _LIGHT else params.burst_rate_deep
        ) / 60.0
        if rate_per_s <= 0.0:
            continue
        t = seg_start / NS_PER_S
        seg_end_s = seg_end / NS_PER_S
        while True:
            t += rng.exponential(1.0 / rate_per_s)
            if t >= seg_end_s:
                break
            duration = rng.uniform(1.0, 5.0)
            offsets = rng.uniform(-params.burst_amplitude, params.burst_amplitude, size=3)
            i0 = int(np.searchsorted(t_s, t, side="left"))
            i1 = int(np.searchsorted(t_s, t + duration, side="left"))
            if i1 <= i0:
                continue
            envelope = np.sin(np.pi * (t_s[i0:i1] - t) / duration)
            acc[i0:i1] += offsets[None, :] * envelope[:, None]

    np.clip(acc, -SENSOR_RANGE_G, SENSOR_RANGE_G, out=acc)
    rows = acc.tolist()
    return [RawSample(t, row[0], row[1], row[2]) for t, row in zip(t_ns, rows)]


# -- live listener -----------------------------------------------------------

def _parse_bind_address(address: str | tuple[str, int]) -> tuple[str, int]:
    if isinstance(address, tuple):
        return address[0], int(address[1])
    host, _, port = address.rpartition(":")
    if not host or not port:
        raise BindError(f"bind address {address!r} is not host:port")
    try:
        return host, int(port)
    except ValueError:
        raise BindError(f"bind address {address!r} has a non-numeric port") from None


class LiveSource:
    """Iterator of RawSamples read from a single TCP client.

    Binds eagerly (so BindError surfaces at construction); accepts the one
    client lazily on first iteration. The actual bound (host, port) is
    exposed as .address, which is how tests bind port 0 and discover the
    ephemeral port. Closing the connection ends the stream; any protocol
    violation drops the client and raises.
    """

    def __init__(self, bind_address: str | tuple[str, int], timeout: float | None = None):
        host, port = _parse_bind_address(bind_address)
        self._timeout = timeout
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        try:
            self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            self._listener.bind((host, port))
            self._listener.listen(1)
        except OSError as exc:
            self._listener.close()
            raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
        self._listener.settimeout(timeout)
        self.address: tuple[str, int] = self._listener.getsockname()[:2]
        self._iterator: Iterator[RawSample] | None = None

    def __iter__(self) -> Iterator[RawSample]:
        return self

    def __next__(self) -> RawSample:
        if self._iterator is None:
            self._iterator = self._stream()
        return next(self._iterator)

    def _stream(self) -> Iterator[RawSample]:
        try:
            conn, peer = self._listener.accept()
        except socket.timeout:
            raise ProtocolError("timed out waiting for a client connection") from None
        finally:
            self._listener.close()
        logger.info("live source: client connected from %s:%s", *peer[:2])
        prev_t: int | None = None
        buffer = b""
        with conn:
            conn.settimeout(self._timeout)
            while True:
                try:
                    chunk = conn.recv(65536)
                except socket.timeout:
                    raise ProtocolError("timed out waiting for sample data") from None
                if not chunk:
                    break
                buffer += chunk
                while True:
                    line, sep, buffer = buffer.partition(b"\n")
                    if not sep:
                        buffer = line
                        break
                    yield self._parse_line(line, prev_t)
                    prev_t = self._last_t
            if buffer.strip():
                yield self._parse_line(buffer, prev_t)
        logger.info("live source: connection closed, stream ends")

    def _parse_line(self, line: bytes, prev_t: int | None) -> RawSample:
        try:
            text = line.decode("ascii")
        except UnicodeDecodeError:
            raise ProtocolError(f"non-ASCII bytes on the wire: {line[:40]!r}") from None
        tokens = text.split()
        if len(tokens) != 4:
            raise ProtocolError(
                f"expected 4 space-separated fields, got {len(tokens)}: {text!r}"
            )
        try:
            sample = _fields_to_sample(*tokens)
        except _FieldError as exc:
            raise ProtocolError(str(exc)) from None
        if prev_t is not None and sample.t_ns <= prev_t:
            raise OrderError(
                f"timestamp {sample.t_ns} ns does not increase past {prev_t} ns"
            )
        self._last_t = sample.t_ns
        return sample

    def close(self) -> None:
        self._listener.close()
        if self._iterator is not None:
            self._iterator.close()


def listen_live(bind_address: str | tuple[str, int], timeout: float | None = None) -> LiveSource:
    """Bind a TCP listener and return the sample stream it will serve."""
    return LiveSource(bind_address, timeout=timeout)
