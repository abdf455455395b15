import socket
import subprocess
import sys
import threading
import time
import wave

import pytest

from lightwake import NS_PER_S, write_trace
from trace_builders import scripted_trace


def cli(*args, timeout=120, env_extra=None):
    import os
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "lightwake", *args],
        capture_output=True, text=True, timeout=timeout, env=env,
    )


def parse_summary(line: str) -> dict:
    return dict(part.split("=", 1) for part in line.strip().split())


@pytest.fixture(scope="module")
def tiny_trace(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "tiny.csv"
    result = cli("generate", "--seed", "5", "--hours", "0.05", "--out", str(path))
    assert result.returncode == 0
    return path


class TestUsage:
    def test_help_everywhere(self):
        assert cli("--help").returncode == 0
        for sub in ("generate", "run", "charts"):
            result = cli(sub, "--help")
            assert result.returncode == 0
            assert sub in result.stdout

    def test_unknown_flag_exits_2(self):
        assert cli("run", "--bogus").returncode == 2
        assert cli("generate", "--frobnicate", "--out", "x").returncode == 2

    def test_missing_subcommand_exits_2(self):
        assert cli().returncode == 2

    def test_generate_rejects_bad_values(self, tmp_path):
        out = str(tmp_path / "t.csv")
        assert cli("generate", "--hours", "0", "--out", out).returncode == 2
        assert cli("generate", "--rate-hz", "500", "--out", out).returncode == 2
        assert cli("generate", "--cycle-min", "-5", "--out", out).returncode == 2

    def test_run_rejects_bad_session_shape(self, tiny_trace):
        result = cli("run", "--trace", str(tiny_trace),
                     "--sleep-hours", "0.5", "--period-min", "60")
        assert result.returncode == 2
        assert cli("run", "--trace", str(tiny_trace), "--speed", "-1").returncode == 2

    def test_run_requires_exactly_one_source(self, tiny_trace):
        assert cli("run").returncode == 2
        assert cli("run", "--trace", str(tiny_trace),
                   "--listen", "127.0.0.1:0").returncode == 2


class TestGenerate:
    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        ra = cli("generate", "--seed", "42", "--hours", "0.1", "--out", str(a))
        rb = cli("generate", "--seed", "42", "--hours", "0.1", "--out", str(b))
        assert ra.returncode == 0 and rb.returncode == 0
        assert a.read_bytes() == b.read_bytes()
        assert f"trace={a}" in ra.stdout

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli("generate", "--seed", "1", "--hours", "0.05", "--out", str(a))
        cli("generate", "--seed", "2", "--hours", "0.05", "--out", str(b))
        assert a.read_bytes() != b.read_bytes()


class TestRun:
    def test_fixture_trace_summary_values(self, paper_case):
        result = cli("run", "--trace", str(paper_case.trace_path))
        assert result.returncode == 0
        summary = parse_summary(result.stdout)
        assert summary["alarm"] == "ThresholdHit"
        assert abs(float(summary["delta"]) - 1.016) <= 1e-9
        assert abs(float(summary["t_min"]) - 0.497) <= 1e-9
        assert abs(float(summary["t_max"]) - 1.662) <= 1e-9
        assert float(summary["t"]) == paper_case.result.outcome.alarm_time_ns / NS_PER_S

    def test_summary_line_shape(self, tiny_trace):
        result = cli("run", "--trace", str(tiny_trace),
                     "--sleep-hours", "0.05", "--period-min", "1")
        assert result.returncode == 0
        summary = parse_summary(result.stdout)
        assert summary["alarm"] in ("ThresholdHit", "SessionEnd")
        assert set(summary) == {"alarm", "t", "delta", "t_min", "t_max"}
        assert float(summary["t"]) <= 0.05 * 3600

    def test_missing_trace_exits_1(self):
        result = cli("run", "--trace", "/nonexistent/trace.csv")
        assert result.returncode == 1
        assert "trace.csv" in result.stderr

    def test_alarm_wav_and_custom_melody(self, tiny_trace, tmp_path):
        melody_file = tmp_path / "tune.txt"
        melody_file.write_text("880:100\n0:50\n440:100\n", encoding="utf-8")
        wav_path = tmp_path / "alarm.wav"
        result = cli("run", "--trace", str(tiny_trace),
                     "--sleep-hours", "0.05", "--period-min", "1",
                     "--alarm-wav", str(wav_path), "--melody", str(melody_file))
        assert result.returncode == 0
        with wave.open(str(wav_path), "rb") as fh:
            assert fh.getnframes() == round(0.250 * 16000)

    def test_log_level_env_is_accepted(self, tiny_trace):
        result = cli("run", "--trace", str(tiny_trace),
                     "--sleep-hours", "0.05", "--period-min", "1",
                     env_extra={"LIGHTWAKE_LOG_LEVEL": "DEBUG"})
        assert result.returncode == 0


class TestEndToEnd:
    def test_generate_run_charts_smoke(self, tmp_path):
        trace = tmp_path / "night.csv"
        log = tmp_path / "events.jsonl"
        charts = tmp_path / "charts"
        assert cli("generate", "--seed", "7", "--hours", "0.2",
                   "--out", str(trace)).returncode == 0
        run = cli("run", "--trace", str(trace), "--sleep-hours", "0.2",
                  "--period-min", "3", "--log", str(log))
        assert run.returncode == 0
        lines = log.read_text(encoding="utf-8").splitlines()
        assert sum('"kind":"AlarmFired"' in line for line in lines) == 1
        result = cli("charts", "--log", str(log), "--out-dir", str(charts))
        assert result.returncode == 0
        assert (charts / "summary.csv").exists()
        assert (charts / "period_0.csv").exists()

    def test_charts_missing_log_exits_1(self, tmp_path):
        missing = tmp_path / "absent.jsonl"
        result = cli("charts", "--log", str(missing), "--out-dir", str(tmp_path / "c"))
        assert result.returncode == 1
        assert "absent.jsonl" in result.stderr

    def test_speed_invariance_through_cli(self, tmp_path):
        trace = tmp_path / "t.csv"
        cli("generate", "--seed", "3", "--hours", "0.05", "--out", str(trace))
        logs = []
        for speed, name in (("0", "a.jsonl"), ("3600", "b.jsonl")):
            log = tmp_path / name
            result = cli("run", "--trace", str(trace), "--sleep-hours", "0.05",
                         "--period-min", "1", "--speed", speed, "--log", str(log))
            assert result.returncode == 0
            logs.append(log.read_bytes())
        assert logs[0] == logs[1]


def free_port() -> int:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def send_trace_lines(port: int, trace_path, deadline_s: float = 30.0):
    payload = b"".join(
        line.replace(",", " ").encode("ascii") + b"\n"
        for line in trace_path.read_text(encoding="utf-8").splitlines()
        if line and not line.startswith("#") and not line.startswith("t_s")
    )
    deadline = time.monotonic() + deadline_s
    while True:
        try:
            conn = socket.create_connection(("127.0.0.1", port), timeout=2)
            break
        except OSError:
            if time.monotonic() > deadline:
                raise
            time.sleep(0.05)
    with conn:
        try:
            conn.sendall(payload)
        except (BrokenPipeError, ConnectionResetError):
            pass  # server stops reading the moment the alarm fires


class TestListen:
    def test_listen_matches_file_replay(self, tmp_path):
        header, samples = scripted_trace([0.5, 0.9], [0.7], period_s=60)
        trace = tmp_path / "live.csv"
        write_trace(trace, header, samples)
        session = ("--sleep-hours", str(3 / 60.0), "--period-min", "1")

        file_run = cli("run", "--trace", str(trace), *session)
        assert file_run.returncode == 0

        port = free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "lightwake", "run",
             "--listen", f"127.0.0.1:{port}", *session],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
        )
        feeder = threading.Thread(target=send_trace_lines, args=(port, trace))
        feeder.start()
        try:
            stdout, stderr = proc.communicate(timeout=60)
        finally:
            feeder.join(timeout=10)
            if proc.poll() is None:
                proc.kill()
        assert proc.returncode == 0, stderr
        assert parse_summary(stdout) == parse_summary(file_run.stdout)
