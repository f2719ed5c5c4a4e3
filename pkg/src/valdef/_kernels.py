"""Dense coefficient kernels for series over F_q.

A series chunk is an ``int64`` array of shape ``(L, k)``: row ``i`` holds the
F_q coefficient of the ``i``-th power of the uniformizer, written in the
polynomial basis ``1, g, ..., g^(k-1)`` with residues in ``[0, p)``.  ``mod`` is
the monic defining polynomial of F_q, constant-first, length ``k + 1``.

Two implementations share one signature: numba ``@njit`` kernels and a pure
numpy path.  Set ``VALDEF_NO_NUMBA=1`` to force the numpy path; it is also used
when numba cannot be imported.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


# --------------------------------------------------------------------------
# numpy implementation
# --------------------------------------------------------------------------

def _reduce_np(acc, p, mod):
    k = mod.shape[0] - 1
    acc %= p
    for d in range(acc.shape[1] - 1, k - 1, -1):
        c = acc[:, d]
        if c.any():
            acc[:, d - k:d] -= np.outer(c, mod[:k])
            acc[:, d - k:d] %= p
    return acc[:, :k].copy()


def mul_full_np(a, b, p, mod):
    la, k = a.shape
    lb = b.shape[0]
    if la == 0 or lb == 0:
        return np.zeros((0, k), np.int64)
    acc = np.zeros((la + lb - 1, 2 * k - 1), np.int64)
    for x in range(k):
        ax = a[:, x]
        if not ax.any():
            continue
        for y in range(k):
            by = b[:, y]
            if by.any():
                acc[:, x + y] += np.convolve(ax, by)
    return _reduce_np(acc, p, mod)


def mul_trunc_np(a, b, n, p, mod):
    return mul_full_np(a[:n], b[:n], p, mod)[:n]


def ff_mul_rows_np(a, b, p, mod):
    """Row-wise product of two ``(L, k)`` arrays of field elements."""
    n, k = a.shape
    acc = np.zeros((n, 2 * k - 1), np.int64)
    for x in range(k):
        for y in range(k):
            acc[:, x + y] += a[:, x] * b[:, y]
    return _reduce_np(acc, p, mod)


def inv_trunc_np(a, n, inv0, p, mod):
    # Newton doubling: y <- y * (2 - a*y)
    k = a.shape[1]
    y = np.zeros((1, k), np.int64)
    y[0] = inv0
    prec = 1
    two = np.zeros((1, k), np.int64)
    two[0, 0] = 2 % p
    while prec < n:
        prec = min(2 * prec, n)
        ay = mul_trunc_np(a, y, prec, p, mod)
        corr = -ay
        corr[0] += two[0]
        corr %= p
        y = mul_trunc_np(y, corr, prec, p, mod)
    out = np.zeros((n, k), np.int64)
    out[:y.shape[0]] = y
    return out


def divmod_np(a, b, inv_lead, p, mod):
    """Quotient and remainder of ``a`` by ``b`` in F_q[s] (top-down)."""
    r = a.copy() % p
    la = r.shape[0]
    lb, k = b.shape
    if la < lb:
        return np.zeros((0, k), np.int64), r
    q = np.zeros((la - lb + 1, k), np.int64)
    for i in range(la - 1, lb - 2, -1):
        if not r[i].any():
            continue
        c = ff_mul_rows_np(r[i:i + 1], inv_lead.reshape(1, k), p, mod)
        q[i - lb + 1] = c[0]
        prod = ff_mul_rows_np(np.repeat(c, lb, axis=0), b, p, mod)
        r[i - lb + 1:i + 1] = (r[i - lb + 1:i + 1] - prod) % p
    return q, r[:lb - 1]


# --------------------------------------------------------------------------
# numba implementation
# --------------------------------------------------------------------------

def _build_numba():
    njit = numba.njit(cache=True, nogil=True)

    @njit
    def _reduce_row(acc, p, mod, out):
        k = mod.shape[0] - 1
        for d in range(acc.shape[0]):
            acc[d] %= p
        for d in range(acc.shape[0] - 1, k - 1, -1):
            c = acc[d] % p
            if c != 0:
                for i in range(k):
                    acc[d - k + i] = (acc[d - k + i] - c * mod[i]) % p
        for i in range(k):
            out[i] = acc[i] % p

    @njit
    def ff_mul_into(x, y, p, mod, out):
        k = x.shape[0]
        acc = np.zeros(2 * k - 1, np.int64)
        for i in range(k):
            xi = x[i]
            if xi != 0:
                for j in range(k):
                    acc[i + j] += xi * y[j]
        _reduce_row(acc, p, mod, out)

    @njit
    def mul_trunc_nb(a, b, n, p, mod):
        la, k = a.shape
        lb = b.shape[0]
        width = 2 * k - 1
        m = min(n, la + lb - 1) if la > 0 and lb > 0 else 0
        acc = np.zeros((m, width), np.int64)
        for i in range(min(la, m)):
            for x in range(k):
                ax = a[i, x]
                if ax == 0:
                    continue
                for j in range(min(lb, m - i)):
                    row = acc[i + j]
                    for y in range(k):
                        row[x + y] += ax * b[j, y]
        out = np.zeros((m, k), np.int64)
        for r in range(m):
            _reduce_row(acc[r], p, mod, out[r])
        return out

    @njit
    def mul_full_nb(a, b, p, mod):
        return mul_trunc_nb(a, b, a.shape[0] + b.shape[0], p, mod)

    @njit
    def ff_mul_rows_nb(a, b, p, mod):
        n, k = a.shape
        out = np.zeros((n, k), np.int64)
        for r in range(n):
            ff_mul_into(a[r], b[r], p, mod, out[r])
        return out

    @njit
    def inv_trunc_nb(a, n, inv0, p, mod):
        la, k = a.shape
        out = np.zeros((n, k), np.int64)
        for i in range(k):
            out[0, i] = inv0[i]
        tmp = np.zeros(k, np.int64)
        s = np.zeros(k, np.int64)
        width = 2 * k - 1
        acc = np.zeros(width, np.int64)
        for i in range(1, n):
            for x in range(width):
                acc[x] = 0
            for j in range(1, min(i, la - 1) + 1):
                for x in range(k):
                    ax = a[j, x]
                    if ax != 0:
                        for y in range(k):
                            acc[x + y] += ax * out[i - j, y]
            _reduce_row(acc, p, mod, s)
            ff_mul_into(s, inv0, p, mod, tmp)
            for x in range(k):
                out[i, x] = (p - tmp[x]) % p
        return out

    @njit
    def divmod_nb(a, b, inv_lead, p, mod):
        la, k = a.shape
        lb = b.shape[0]
        r = a.copy()
        for i in range(la):
            for x in range(k):
                r[i, x] %= p
        if la < lb:
            return np.zeros((0, k), np.int64), r
        q = np.zeros((la - lb + 1, k), np.int64)
        c = np.zeros(k, np.int64)
        prod = np.zeros(k, np.int64)
        for i in range(la - 1, lb - 2, -1):
            nz = False
            for x in range(k):
                if r[i, x] != 0:
                    nz = True
            if not nz:
                continue
            ff_mul_into(r[i], inv_lead, p, mod, c)
            for x in range(k):
                q[i - lb + 1, x] = c[x]
            for j in range(lb):
                ff_mul_into(c, b[j], p, mod, prod)
                for x in range(k):
                    r[i - lb + 1 + j, x] = (r[i - lb + 1 + j, x] - prod[x]) % p
        return q, r[:lb - 1].copy()

    return mul_full_nb, mul_trunc_nb, ff_mul_rows_nb, inv_trunc_nb, divmod_nb


NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("VALDEF_NO_NUMBA", "") in ("", "0")

if NUMBA_AVAILABLE:
    (mul_full_nb, mul_trunc_nb, ff_mul_rows_nb,
     inv_trunc_nb, divmod_nb) = _build_numba()

if USE_NUMBA:
    BACKEND = "numba"
    mul_full = mul_full_nb
    mul_trunc = mul_trunc_nb
    ff_mul_rows = ff_mul_rows_nb
    inv_trunc = inv_trunc_nb
    divmod_poly = divmod_nb
else:
    BACKEND = "numpy"
    mul_full = mul_full_np
    mul_trunc = mul_trunc_np
    ff_mul_rows = ff_mul_rows_np
    inv_trunc = inv_trunc_np
    divmod_poly = divmod_np
