import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import fields
from valdef import _kernels as K

pytestmark = pytest.mark.skipif(not K.NUMBA_AVAILABLE, reason="numba not importable")


@st.composite
def chunks(draw, field, lo=1, hi=40):
    n = draw(st.integers(lo, hi))
    flat = draw(st.lists(st.integers(0, field.p - 1), min_size=n * field.k, max_size=n * field.k))
    return np.array(flat, np.int64).reshape(n, field.k)


@given(st.data())
def test_mul_kernels_agree(data):
    F = data.draw(fields)
    a, b = data.draw(chunks(F)), data.draw(chunks(F))
    n = data.draw(st.integers(1, 50))
    args = (F.p, F.mod_array)
    assert np.array_equal(K.mul_full_nb(a, b, *args), K.mul_full_np(a, b, *args))
    assert np.array_equal(K.mul_trunc_nb(a, b, n, *args), K.mul_trunc_np(a, b, n, *args))
    m = min(len(a), len(b))
    assert np.array_equal(K.ff_mul_rows_nb(a[:m], b[:m], *args), K.ff_mul_rows_np(a[:m], b[:m], *args))


@given(st.data())
def test_inverse_kernels_agree(data):
    F = data.draw(fields)
    a = data.draw(chunks(F))
    if not a[0].any():
        a[0, 0] = 1
    inv0 = F.element(tuple(a[0])).inverse().as_array()
    n = data.draw(st.integers(1, 50))
    got = K.inv_trunc_nb(a, n, inv0, F.p, F.mod_array)
    assert np.array_equal(got, K.inv_trunc_np(a, n, inv0, F.p, F.mod_array))
    one = K.mul_trunc_np(a, got, n, F.p, F.mod_array)
    assert one[0, 0] == 1 and not one[0, 1:].any() and not one[1:].any()


def test_numpy_backend_end_to_end():
    code = ("from valdef import _kernels as K; assert K.BACKEND == 'numpy';"
            "from valdef.finite_field import parse_field_spec as P;"
            "from valdef.suites import run_suite;"
            "r = run_suite('chi', P('4'), 30, 3); assert r['failed'] == 0; print(r['passed'])")
    env = dict(os.environ, VALDEF_NO_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == "30"
