"""Rewrite the chi golden files.  Run only after an intended change to emit_chi."""

from pathlib import Path

from valdef.finite_field import parse_field_spec
from valdef.formulas import dumps, emit_chi, formula_to_json, pretty

HERE = Path(__file__).parent
GOLDEN_Q = (2, 3, 4, 5, 8, 9)


def render(q, style="pipeline"):
    formula = emit_chi(parse_field_spec(str(q)), style)
    return dumps(formula_to_json(formula)), pretty(formula) + "\n"


def main():
    for q in GOLDEN_Q:
        js, text = render(q)
        (HERE / f"chi_q{q}.json").write_text(js, encoding="utf-8")
        (HERE / f"chi_q{q}.txt").write_text(text, encoding="utf-8")
    for p in (2, 3):
        js, text = render(p, "explicit_fp")
        (HERE / f"chi_explicit_p{p}.json").write_text(js, encoding="utf-8")
        (HERE / f"chi_explicit_p{p}.txt").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()
