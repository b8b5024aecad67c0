import sys
from pathlib import Path

import pytest

TOY_SCORER = Path(__file__).parent / "toy_scorer.py"


def toy_scorer_cmd(mode: str = "ok") -> str:
    return f"{sys.executable} {TOY_SCORER} {mode}"


def write_corpus(path: Path, lines: list[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path


@pytest.fixture
def tmp_corpus(tmp_path):
    def make(lines: list[str], name: str = "corpus.txt") -> Path:
        return write_corpus(tmp_path / name, lines)

    return make
