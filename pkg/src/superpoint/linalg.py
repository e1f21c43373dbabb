"""Scalar matrix helpers for bodies (lists of lists of coefficients).

Exact inputs are handled with fraction-free Bareiss elimination and
Gauss-Jordan over the rationals; numeric inputs go through numpy.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .coefficients import is_exact
from .errors import NotInvertibleError
from .polynomial import Poly


def identity(n: int, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def is_exact_matrix(a) -> bool:
    return all(is_exact(x) for row in a for x in row)


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def matsub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def shift(a, lam):
    """``a - lam*I``."""
    return [[x - lam if i == j else x for j, x in enumerate(row)] for i, row in enumerate(a)]


def matpow(a, k: int):
    result = identity(len(a))
    for _ in range(k):
        result = matmul(result, a)
    return result


def det_bareiss(a):
    """Determinant by fraction-free elimination.

    Works over any commutative ring with exact division by former pivots
    (rationals, Gaussian rationals, :class:`Poly`).
    """
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [list(row) for row in a]
    sign = 1
    prev = None
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return m[k][k] * 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                if prev is None:
                    m[i][j] = num
                elif isinstance(num, Poly):
                    m[i][j] = num.exact_div(prev)
                else:
                    m[i][j] = num / prev
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return -d if sign < 0 else d


def det(a):
    if is_exact_matrix(a):
        return det_bareiss(a)
    return complex(np.linalg.det(np.array(a, dtype=complex)))


def charpoly(a) -> Poly:
    """``det(t*I - a)`` as a monic :class:`Poly`."""
    n = len(a)
    if n == 0:
        return Poly([Fraction(1)])
    if is_exact_matrix(a):
        tm = [
            [Poly([-x, Fraction(1)]) if i == j else Poly([-x]) for j, x in enumerate(row)]
            for i, row in enumerate(a)
        ]
        p = det_bareiss(tm)
        return p if isinstance(p, Poly) else Poly([p])
    coeffs = np.poly(np.array(a, dtype=complex))
    return Poly([complex(c) for c in coeffs[::-1]])


def inverse(a):
    n = len(a)
    if not is_exact_matrix(a):
        arr = np.array(a, dtype=complex)
        if n and abs(np.linalg.det(arr)) == 0:
            raise NotInvertibleError("body matrix is singular", 0j)
        inv = np.linalg.inv(arr)
        return [[complex(x) for x in row] for row in inv]
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            raise NotInvertibleError("body matrix is singular (determinant 0)", Fraction(0))
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [row[n:] for row in m]


def rref(a):
    """Reduced row echelon form and pivot columns (exact)."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(a, ncols: int | None = None):
    """Basis of ``{x : a x = 0}`` as a list of column vectors (exact)."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    n = len(a[0])
    m, pivots = rref(a)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(m, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def rank(a) -> int:
    if not a:
        return 0
    if is_exact_matrix(a):
        return len(rref(a)[1])
    return int(np.linalg.matrix_rank(np.array(a, dtype=complex)))


def trace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))
