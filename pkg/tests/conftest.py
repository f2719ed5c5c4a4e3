import os

from hypothesis import HealthCheck, settings, strategies as st

from valdef.finite_field import parse_field_spec
from valdef.laurent import LaurentPoly

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_FIELDS = ("2", "3", "4", "5", "8", "9")

fields = st.sampled_from(SMALL_FIELDS).map(parse_field_spec)


@st.composite
def elements(draw, field, nonzero=False):
    return field.from_index(draw(st.integers(1 if nonzero else 0, field.q - 1)))


@st.composite
def series(draw, field, ram=1, vmin=-6, vmax=6, span=6, nonzero=False):
    """A Laurent polynomial with valuation numerator in ``[vmin*ram, vmax*ram]``."""
    if not nonzero and draw(st.integers(0, 9)) == 0:
        return LaurentPoly.zero(field, ram)
    v = draw(st.integers(vmin * ram, vmax * ram))
    terms = {v: draw(elements(field, nonzero=True))}
    for j in range(1, span + 1):
        c = draw(elements(field))
        if c:
            terms[v + j] = c
    return LaurentPoly.from_terms(field, terms, ram)
