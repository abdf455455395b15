"""Command-line entry point: generate traces, run sessions, export charts.

Exit codes: 0 success, 1 runtime error (missing/corrupt files, source
failures), 2 usage error (bad flags or flag values). Set the
LIGHTWAKE_LOG_LEVEL environment variable (DEBUG/INFO/WARNING/...) for
diagnostics on standard error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .detector import AlarmTrigger, DetectorOutcome
from .engine import HOUR_NS, MINUTE_NS, NS_PER_S, SessionConfig, run_session
from .errors import LightwakeError
from .sinks import DEFAULT_ALARM_MELODY, export_period_charts, melody_to_wav, parse_melody
from .sources import SleepModelParams, TraceHeader, generate_trace, listen_live, read_trace, write_trace

logger = logging.getLogger(__name__)


def _configure_logging() -> None:
    level_name = os.environ.get("LIGHTWAKE_LOG_LEVEL", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _fmt(value: float | None) -> str:
    return "-" if value is None else repr(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lightwake",
        description="Accelerometer-based light-sleep alarm: deterministic "
                    "trace generation, session replay, and chart export.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="synthesize a seeded accelerometer trace CSV")
    gen.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    gen.add_argument("--hours", type=float, default=8.0, help="trace length in hours (default 8)")
    gen.add_argument("--rate-hz", type=float, default=4.0, help="sampling rate, 1..250 Hz (default 4)")
    gen.add_argument("--cycle-min", type=float, default=90.0, help="sleep cycle length in minutes (default 90)")
    gen.add_argument("--out", required=True, help="output trace CSV path")
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser("run", help="run one sleep session over a trace or a live TCP feed")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--trace", help="trace CSV to replay")
    src.add_argument("--listen", metavar="HOST:PORT", help="accept one client on the live line protocol")
    run.add_argument("--sleep-hours", type=float, default=8.0, help="sleep duration in hours (default 8)")
    run.add_argument("--period-min", type=float, default=60.0, help="period length in minutes (default 60)")
    run.add_argument("--speed", type=float, default=0.0,
                     help="virtual-to-wall clock ratio; 1=real time, 0=as fast as possible (default 0)")
    run.add_argument("--log", help="write the JSONL event log here")
    run.add_argument("--alarm-wav", help="write the alarm melody WAV here when the alarm fires")
    run.add_argument("--melody", help="melody text file (freq_hz:duration_ms per line, 0 = rest)")
    run.set_defaults(func=cmd_run)

    charts = sub.add_parser("charts", help="export per-period delta CSVs and a summary from an event log")
    charts.add_argument("--log", required=True, help="JSONL event log to read")
    charts.add_argument("--out-dir", required=True, help="directory for period_<k>.csv and summary.csv")
    charts.set_defaults(func=cmd_charts)
    return parser


def cmd_generate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.hours <= 0:
        parser.error(f"--hours must be positive, got {args.hours!r}")
    if not (1.0 <= args.rate_hz <= 250.0):
        parser.error(f"--rate-hz must be within 1..250, got {args.rate_hz!r}")
    if args.cycle_min <= 0:
        parser.error(f"--cycle-min must be positive, got {args.cycle_min!r}")
    header = TraceHeader(
        sample_rate_hz=args.rate_hz,
        duration_ns=int(round(args.hours * HOUR_NS)),
        label=f"synthetic seed={args.seed}",
    )
    params = SleepModelParams(
        cycle_length_ns=int(round(args.cycle_min * MINUTE_NS)),
        rng_seed=args.seed,
    )
    samples = generate_trace(params, header)
    write_trace(args.out, header, samples)
    print(f"trace={args.out} samples={len(samples)} rate_hz={args.rate_hz!r} seed={args.seed}")
    return 0


def cmd_run(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    sleep_ns = int(round(args.sleep_hours * HOUR_NS))
    period_ns = int(round(args.period_min * MINUTE_NS))
    if sleep_ns <= 0 or period_ns <= 0:
        parser.error("--sleep-hours and --period-min must be positive")
    if sleep_ns < 2 * period_ns:
        parser.error(
            f"--sleep-hours {args.sleep_hours!r} is too short for --period-min "
            f"{args.period_min!r}: need at least one learning period plus the final one"
        )
    if args.speed < 0:
        parser.error(f"--speed must be >= 0, got {args.speed!r}")

    melody = DEFAULT_ALARM_MELODY
    if args.melody:
        with open(args.melody, "r", encoding="utf-8") as fh:
            melody = parse_melody(fh.read(), name=os.path.basename(args.melody))

    if args.trace:
        _, samples = read_trace(args.trace)
        source = samples
        logger.info("replaying %d samples from %s", len(samples), args.trace)
    else:
        source = listen_live(args.listen)
        logger.info("listening on %s:%d", *source.address)

    def on_alarm(outcome: DetectorOutcome) -> None:
        if args.alarm_wav:
            melody_to_wav(melody, args.alarm_wav)
            logger.info("alarm melody written to %s", args.alarm_wav)

    config = SessionConfig(sleep_duration_ns=sleep_ns, period_length_ns=period_ns,
                           speed=args.speed)
    sink = open(args.log, "w", encoding="utf-8", newline="\n") if args.log else None
    try:
        result = run_session(config, source, event_sink=sink, on_alarm=on_alarm)
    finally:
        if sink is not None:
            sink.close()

    outcome = result.outcome
    thresholds = outcome.final_thresholds
    print(
        f"alarm={outcome.trigger.value}"
        f" t={outcome.alarm_time_ns / NS_PER_S!r}"
        f" delta={_fmt(outcome.trigger_delta)}"
        f" t_min={_fmt(thresholds.t_min)}"
        f" t_max={_fmt(thresholds.t_max)}"
    )
    if outcome.trigger is AlarmTrigger.THRESHOLD_HIT:
        logger.info("light sleep detected; alarm fired early")
    return 0


def cmd_charts(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    written = export_period_charts(args.log, args.out_dir)
    print(f"charts={args.out_dir} files={len(written)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except FileNotFoundError as exc:
        print(f"lightwake: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except LightwakeError as exc:
        print(f"lightwake: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
