import pytest

from valdef.finite_field import parse_field_spec
from valdef.formulas import dumps
from valdef.suites import SUITES, irreducible_quadratics, run_suite


@pytest.mark.parametrize("name", SUITES)
def test_suite_small_run_passes_and_reproduces(name):
    F = parse_field_spec("3")
    a = dumps(run_suite(name, F, 15, 123))
    b = dumps(run_suite(name, F, 15, 123))
    assert a == b
    assert '"failed": 0' in a


def test_seeds_matter():
    F = parse_field_spec("2")
    assert dumps(run_suite("chi", F, 10, 1)) != dumps(run_suite("chi", F, 10, 2))


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", parse_field_spec("2"), 1, 0)


def test_irreducible_quadratics_count():
    for q in ("2", "3", "4", "5"):
        F = parse_field_spec(q)
        assert len(irreducible_quadratics(F)) == (F.q * F.q - F.q) // 2
