"""Exact determinant, rank and inverse over Q (optionally over GF(p)).

Rational matrices are first scaled row by row to integer matrices so that
the Bareiss recurrences stay in ``int``.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence

from .errors import FormatError, SingularMatrixError

Matrix = Sequence[Sequence[Fraction]]

# Cofactor expansion is used up to this size, Bareiss above it.
COFACTOR_MAX = 4


def _shape(M: Matrix):
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if any(len(r) != cols for r in M):
        raise FormatError("ragged matrix")
    return rows, cols


def _integerize(M: Matrix):
    """Return ``(A, scale)`` with ``A`` an int matrix and ``A = scale * M``."""
    A: List[List[int]] = []
    scale = Fraction(1)
    for row in M:
        row = [Fraction(v) for v in row]
        m = lcm(*(v.denominator for v in row)) if row else 1
        A.append([int(v * m) for v in row])
        scale *= m
    return A, scale


def _reduce_mod(M: Matrix, p: int) -> List[List[int]]:
    out = []
    for row in M:
        new = []
        for v in row:
            v = Fraction(v)
            if v.denominator % p == 0:
                raise FormatError(f"denominator of {v} vanishes mod {p}")
            new.append(v.numerator * pow(v.denominator, -1, p) % p)
        out.append(new)
    return out


def _cofactor_det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = 0
    for j, a in enumerate(M[0]):
        if a == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = a * _cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _bareiss_det(A: List[List[int]]) -> int:
    A = [row[:] for row in A]
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * A[n - 1][n - 1]


def _det_mod(A: List[List[int]], p: int) -> int:
    A = [row[:] for row in A]
    n = len(A)
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            det = -det
        det = det * A[k][k] % p
        inv = pow(A[k][k], -1, p)
        for i in range(k + 1, n):
            f = A[i][k] * inv % p
            if f:
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[k])]
    return det % p


def determinant(M: Matrix, modulus: Optional[int] = None):
    """Exact determinant of a square matrix.

    Returns a :class:`Fraction`, or an ``int`` in ``[0, modulus)`` when a prime
    ``modulus`` is given. The empty matrix has determinant 1.
    """
    n, m = _shape(M)
    if n != m:
        raise FormatError(f"determinant of a non-square {n}x{m} matrix")
    if modulus is not None:
        return _det_mod(_reduce_mod(M, modulus), modulus) if n else 1
    if n == 0:
        return Fraction(1)
    if n <= COFACTOR_MAX:
        return Fraction(_cofactor_det([[Fraction(v) for v in row] for row in M]))
    A, scale = _integerize(M)
    return Fraction(_bareiss_det(A)) / scale


def matrix_rank(M: Matrix, modulus: Optional[int] = None) -> int:
    """Rank by fraction-free elimination with full pivoting."""
    rows, cols = _shape(M)
    if rows == 0 or cols == 0:
        return 0
    if modulus is not None:
        A = _reduce_mod(M, modulus)
    else:
        A, _ = _integerize(M)
    prev = 1
    r = 0
    while r < rows and r < cols:
        piv = next(
            ((i, j) for i in range(r, rows) for j in range(r, cols) if A[i][j]),
            None,
        )
        if piv is None:
            break
        i, j = piv
        A[r], A[i] = A[i], A[r]
        if j != r:
            for row in A:
                row[r], row[j] = row[j], row[r]
        arr = A[r][r]
        for i in range(r + 1, rows):
            air = A[i][r]
            row_i, row_r = A[i], A[r]
            for j in range(r + 1, cols):
                if modulus is None:
                    row_i[j] = (row_i[j] * arr - air * row_r[j]) // prev
                else:
                    row_i[j] = (row_i[j] * arr - air * row_r[j]) % modulus
            row_i[r] = 0
        if modulus is None:
            prev = arr
        r += 1
    return r


def inverse(M: Matrix) -> List[List[Fraction]]:
    """Gauss-Jordan inverse over Q."""
    n, m = _shape(M)
    if n != m:
        raise FormatError(f"inverse of a non-square {n}x{m} matrix")
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is not invertible")
        A[k], A[piv] = A[piv], A[k]
        pk = A[k][k]
        A[k] = [v / pk for v in A[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                f = A[i][k]
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return [row[n:] for row in A]
