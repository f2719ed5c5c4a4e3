from pathlib import Path

import pytest

from golden.regenerate import GOLDEN_Q, render

HERE = Path(__file__).parent / "golden"


@pytest.mark.parametrize("q", GOLDEN_Q)
def test_chi_golden(q):
    js, text = render(q)
    assert js == (HERE / f"chi_q{q}.json").read_text(encoding="utf-8")
    assert text == (HERE / f"chi_q{q}.txt").read_text(encoding="utf-8")


@pytest.mark.parametrize("p", [2, 3])
def test_explicit_golden(p):
    js, text = render(p, "explicit_fp")
    assert js == (HERE / f"chi_explicit_p{p}.json").read_text(encoding="utf-8")
    assert text == (HERE / f"chi_explicit_p{p}.txt").read_text(encoding="utf-8")
