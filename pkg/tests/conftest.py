from pathlib import Path

import pytest

from pcdc.io import parse_pda

FIXTURES = Path(__file__).parent / "fixtures"


def load_grid(name):
    return parse_pda((FIXTURES / name).read_text(encoding="utf-8"))[0]


def load_fixture(name):
    return parse_pda((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def load_transcript(name):
    """Parse a typeset replay transcript into demand sets and coded symbols.

    Returns ({j: {(q, n), ...}}, {(t, sender): [(q, n, label), ...]}).
    """
    import re

    text = "\n".join(
        line for line in (FIXTURES / name).read_text(encoding="utf-8").splitlines() if not line.startswith("#")
    )
    demands = {}
    for j, body in re.findall(r"D_(\d+)\s*&?=\s*\\\{(.*?)\\\}", text):
        demands[int(j)] = {(int(q), int(n)) for q, n in re.findall(r"v_\{(\d+),(\d+)\}", body)}
    symbols = {}
    parts = re.split(r"X_(\d+)\^(\d+)", text)
    for t, k, body in zip(parts[1::3], parts[2::3], parts[3::3]):
        symbols[(int(t), int(k))] = [
            (int(q), int(n), int(lab)) for q, n, lab in re.findall(r"v_\{(\d+),(\d+)\}\^(\d+)", body)
        ]
    return demands, symbols


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
