"""Dense mod-p kernels for finite-dimensional structures over F_p.

Two interchangeable backends: numba ``@njit`` loops (default) and plain
numpy.  Set ``GDBIALG_NO_NUMBA=1`` to force the numpy path; ``use_backend``
switches at runtime (tests and the benchmark compare both).

All arrays are ``int64`` with entries reduced into ``[0, p)``.  Dimensions are
desk scale (n <= ~30, p < 2**15), so ``n * p**2`` never overflows.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


# ---------------------------------------------------------------- numpy path


def _rref_numpy(M, p):
    R = np.array(M, dtype=np.int64) % p
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = R[r] * pow(int(R[r, c]), -1, p) % p
        f = R[:, c].copy()
        f[r] = 0
        R = (R - np.outer(f, R[r])) % p
        pivots.append(c)
        r += 1
    return R, np.array(pivots, dtype=np.int64)


def _insert_numpy(basis, pivcols, rank, w, p):
    for r in range(rank):
        c = pivcols[r]
        if w[c]:
            w = (w - w[c] * basis[r]) % p
    nz = np.nonzero(w)[0]
    if nz.size == 0:
        return rank
    c = nz[0]
    basis[rank] = w * pow(int(w[c]), -1, p) % p
    pivcols[rank] = c
    return rank + 1


def _closure_numpy(ops, p, v, basis, pivcols):
    n = v.shape[0]
    rank = _insert_numpy(basis, pivcols, 0, v % p, p)
    q = 0
    while q < rank:
        row = basis[q].copy()
        for k in range(ops.shape[0]):
            rank = _insert_numpy(basis, pivcols, rank, ops[k] @ row % p, p)
            if rank == n:
                return rank
        q += 1
    return rank


def _first_proper_numpy(ops, p, n):
    basis = np.zeros((n, n), dtype=np.int64)
    pivcols = np.zeros(n, dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    for lead in range(n):
        tail = n - 1 - lead
        for code in range(p**tail):
            v[:] = 0
            v[lead] = 1
            x = code
            for t in range(n - 1, lead, -1):
                v[t] = x % p
                x //= p
            if _closure_numpy(ops, p, v, basis, pivcols) < n:
                return v.copy()
    return np.full(n, -1, dtype=np.int64)


def _compose_numpy(T1, T2, p):
    """X[i,j,l,:] = (e_i T1 e_j) T2 e_l and Y[i,j,l,:] = e_i T2 (e_j T1 e_l)."""
    X = np.einsum("ijk,klm->ijlm", T1, T2) % p
    Y = np.einsum("jlk,ikm->ijlm", T1, T2) % p
    return X, Y


# ---------------------------------------------------------------- numba path


def _rref_loops(M, p):
    R = M.copy() % p
    rows, cols = R.shape
    pivots = np.zeros(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        k = -1
        for i in range(r, rows):
            if R[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(cols):
                tmp = R[r, j]
                R[r, j] = R[k, j]
                R[k, j] = tmp
        inv = _modinv(R[r, c], p)
        for j in range(cols):
            R[r, j] = R[r, j] * inv % p
        for i in range(rows):
            if i != r and R[i, c] != 0:
                f = R[i, c]
                for j in range(cols):
                    R[i, j] = (R[i, j] - f * R[r, j]) % p
        pivots[r] = c
        r += 1
    return R, pivots[:r]


def _modinv(a, p):
    # Fermat; p is prime
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _insert_loops(basis, pivcols, rank, w, p):
    n = w.shape[0]
    for r in range(rank):
        c = pivcols[r]
        f = w[c]
        if f != 0:
            for j in range(n):
                w[j] = (w[j] - f * basis[r, j]) % p
    c = -1
    for j in range(n):
        if w[j] != 0:
            c = j
            break
    if c < 0:
        return rank
    inv = _modinv(w[c], p)
    for j in range(n):
        basis[rank, j] = w[j] * inv % p
    pivcols[rank] = c
    return rank + 1


def _closure_loops(ops, p, v, basis, pivcols, w):
    n = v.shape[0]
    for j in range(n):
        w[j] = v[j] % p
    rank = _insert_loops(basis, pivcols, 0, w, p)
    q = 0
    K = ops.shape[0]
    while q < rank:
        for k in range(K):
            for i in range(n):
                s = 0
                for j in range(n):
                    s += ops[k, i, j] * basis[q, j]
                w[i] = s % p
            rank = _insert_loops(basis, pivcols, rank, w, p)
            if rank == n:
                return rank
        q += 1
    return rank


def _first_proper_loops(ops, p, n):
    basis = np.zeros((n, n), dtype=np.int64)
    pivcols = np.zeros(n, dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    w = np.zeros(n, dtype=np.int64)
    for lead in range(n):
        tail = n - 1 - lead
        total = 1
        for _ in range(tail):
            total *= p
        for code in range(total):
            for j in range(n):
                v[j] = 0
            v[lead] = 1
            x = code
            for t in range(n - 1, lead, -1):
                v[t] = x % p
                x //= p
            if _closure_loops(ops, p, v, basis, pivcols, w) < n:
                return v.copy()
    out = np.empty(n, dtype=np.int64)
    out[:] = -1
    return out


def _compose_loops(T1, T2, p):
    n = T1.shape[0]
    X = np.zeros((n, n, n, n), dtype=np.int64)
    Y = np.zeros((n, n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for m in range(n):
                    sx = 0
                    sy = 0
                    for k in range(n):
                        sx += T1[i, j, k] * T2[k, l, m]
                        sy += T1[j, l, k] * T2[i, k, m]
                    X[i, j, l, m] = sx % p
                    Y[i, j, l, m] = sy % p
    return X, Y


_NUMPY = {
    "rref": _rref_numpy,
    "closure": lambda ops, p, v: _closure_numpy(
        ops, p, v, np.zeros((v.shape[0],) * 2, np.int64), np.zeros(v.shape[0], np.int64)
    ),
    "first_proper": _first_proper_numpy,
    "compose": _compose_numpy,
}

_NUMBA = None


def _numba_table():
    global _NUMBA
    if _NUMBA is None:
        jit = numba.njit(cache=False)
        modinv = jit(_modinv)
        g = {"np": np, "_modinv": modinv}
        # rebind helpers so the jitted functions see jitted callees
        insert = jit(_rebind(_insert_loops, {**g}))
        closure = jit(_rebind(_closure_loops, {**g, "_insert_loops": insert}))
        first = jit(_rebind(_first_proper_loops, {**g, "_closure_loops": closure}))
        rref = jit(_rebind(_rref_loops, g))
        compose = jit(_compose_loops)

        def closure_entry(ops, p, v):
            n = v.shape[0]
            return closure(
                ops, p, v, np.zeros((n, n), np.int64), np.zeros(n, np.int64), np.zeros(n, np.int64)
            )

        _NUMBA = {
            "rref": rref,
            "closure": closure_entry,
            "first_proper": first,
            "compose": compose,
        }
    return _NUMBA


def _rebind(fn, globs):
    import types

    merged = dict(fn.__globals__)
    merged.update(globs)
    return types.FunctionType(fn.__code__, merged, fn.__name__, fn.__defaults__, fn.__closure__)


def available_backends():
    return ("numpy", "numba") if numba is not None else ("numpy",)


_backend = "numpy" if (numba is None or os.environ.get("GDBIALG_NO_NUMBA", "") not in ("", "0")) else "numba"


def use_backend(name: str) -> None:
    global _backend
    if name not in available_backends():
        raise ValueError(f"backend {name!r} unavailable")
    _backend = name


def backend() -> str:
    return _backend


def _impl(name, which=None):
    which = which or _backend
    return (_numba_table() if which == "numba" else _NUMPY)[name]


def _i64(a, p):
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)


def rref_mod_p(M, p: int, backend: str | None = None):
    """Reduced row echelon form of ``M`` over F_p; returns ``(R, pivot_columns)``."""
    M = _i64(M, p)
    if M.ndim != 2:
        raise ValueError("rref_mod_p expects a matrix")
    if M.shape[0] == 0 or M.shape[1] == 0:
        return M.copy(), np.zeros(0, np.int64)
    return _impl("rref", backend)(M, p)


def closure_dim_mod_p(ops, v, p: int, backend: str | None = None) -> int:
    """Dimension of the smallest subspace containing ``v`` stable under every ``ops[k]``."""
    return int(_impl("closure", backend)(_i64(ops, p), p, _i64(v, p)))


def first_proper_closure(ops, n: int, p: int, backend: str | None = None):
    """Scan projective points of F_p^n in lexicographic order.

    Returns the first normalized vector (leading entry 1) whose closure under
    ``ops`` is a proper subspace, or ``None`` when every point generates.
    """
    ops = _i64(ops, p).reshape(-1, n, n)
    v = _impl("first_proper", backend)(ops, p, n)
    return None if v[0] < 0 else v


def compose_mod_p(T1, T2, p: int, backend: str | None = None):
    """Iterated products of two structure tensors (see ``_compose_numpy``)."""
    return _impl("compose", backend)(_i64(T1, p), _i64(T2, p), p)
