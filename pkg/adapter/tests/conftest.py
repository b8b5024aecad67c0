import json
import subprocess
import sys

import pytest

STUB_VOCAB = {"barks": 0.3, "bark": 0.1, "is": 0.25, "are": 0.15, "sleeps": 0.2}


@pytest.fixture
def stub_file(tmp_path):
    path = tmp_path / "distribution.json"
    path.write_text(json.dumps({"vocab": STUB_VOCAB}), encoding="utf-8")
    return path


class AdapterProcess:
    """Raw line-protocol client for driving the adapter in tests."""

    def __init__(self, *args: str):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "mlm_adapter", *args],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def read(self) -> dict:
        line = self.proc.stdout.readline()
        assert line, "adapter closed its output stream"
        return json.loads(line)

    def send(self, obj) -> None:
        text = obj if isinstance(obj, str) else json.dumps(obj)
        self.proc.stdin.write(text + "\n")
        self.proc.stdin.flush()

    def close(self) -> int:
        self.proc.stdin.close()
        self.proc.stdout.close()
        self.proc.stderr.close()
        return self.proc.wait(timeout=10)


@pytest.fixture
def adapter(stub_file):
    proc = AdapterProcess("--model", f"stub:{stub_file}")
    yield proc
    proc.close()
