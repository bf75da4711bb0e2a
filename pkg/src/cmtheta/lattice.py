"""Integer lattices: Hermite normal form, LLL on Gram matrices and short-vector enumeration."""

from __future__ import annotations

import math
from fractions import Fraction
from math import gcd

import numpy as np


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def hnf(rows) -> list[list[int]]:
    """Row-style Hermite normal form of the Z-span of integer rows.

    The result is upper triangular with positive pivots and entries above each
    pivot reduced into [0, pivot).  Zero rows are dropped.
    """
    A = [list(map(int, r)) for r in rows]
    if not A:
        return []
    ncols = len(A[0])
    out = []
    r0 = 0
    for col in range(ncols):
        # gather rows (from r0) with nonzero entry in col and gcd-reduce them
        piv = None
        for i in range(r0, len(A)):
            if A[i][col]:
                piv = i
                break
        if piv is None:
            continue
        A[r0], A[piv] = A[piv], A[r0]
        for i in range(r0 + 1, len(A)):
            while A[i][col]:
                q = A[r0][col] // A[i][col]
                A[r0] = [x - q * y for x, y in zip(A[r0], A[i])]
                A[r0], A[i] = A[i], A[r0]
        if A[r0][col] < 0:
            A[r0] = [-x for x in A[r0]]
        p = A[r0][col]
        for i in range(r0):
            q = A[i][col] // p
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r0])]
        r0 += 1
        out = A[:r0]
    return [list(r) for r in A[:r0]]


def rational_hnf(rows):
    """HNF of rational rows: returns (integer HNF rows, denominator)."""
    den = 1
    for r in rows:
        for x in r:
            den = _lcm(den, Fraction(x).denominator)
    H = hnf([[int(Fraction(x) * den) for x in r] for r in rows])
    g = 0
    for r in H:
        for x in r:
            g = gcd(g, x)
    g = gcd(g, den)
    if g > 1:
        H = [[x // g for x in r] for r in H]
        den //= g
    return H, den


def solve_upper(H, v):
    """Integer coordinates c with c H = v for a square HNF H, or None."""
    n = len(H)
    v = [Fraction(x) for x in v]
    c = [Fraction(0)] * n
    for i in range(n):
        col = next(j for j in range(len(H[i])) if H[i][j])
        c[i] = v[col] / H[i][col]
        if c[i].denominator != 1:
            return None
        for j in range(len(v)):
            v[j] -= c[i] * H[i][j]
    if any(v):
        return None
    return [int(x) for x in c]


def lll_gram(G, delta: Fraction = Fraction(3, 4)):
    """LLL reduction of a positive definite rational Gram matrix.

    Returns (reduced Gram, U) with U unimodular and reduced = U G U^T.
    """
    n = len(G)
    G = [[Fraction(x) for x in r] for r in G]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        Bs = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = G[i][j]
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * Bs[k]
                mu[i][j] = s / Bs[j]
            s = G[i][i]
            for k in range(i):
                s -= mu[i][k] * mu[i][k] * Bs[k]
            Bs[i] = s
        return mu, Bs

    k = 1
    mu, Bs = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                U[k] = [a - q * b for a, b in zip(U[k], U[j])]
                # G' = E G E^T with E = I - q e_k e_j^T
                rowk = [G[k][t] - q * G[j][t] for t in range(n)]
                gkk = G[k][k] - 2 * q * G[k][j] + q * q * G[j][j]
                for t in range(n):
                    G[k][t] = rowk[t]
                    G[t][k] = rowk[t]
                G[k][k] = gkk
                mu, Bs = gso()
        if Bs[k] >= (delta - mu[k][k - 1] ** 2) * Bs[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            G[k], G[k - 1] = G[k - 1], G[k]
            for r in G:
                r[k], r[k - 1] = r[k - 1], r[k]
            mu, Bs = gso()
            k = max(k - 1, 1)
    return G, U


def _cholesky_float(G):
    n = len(G)
    A = np.array([[float(x) for x in r] for r in G])
    q = np.zeros((n, n))
    # q[i][i] diagonal, q[i][j] (j > i) mu coefficients: Q(x) = sum q_ii (x_i + sum_j q_ij x_j)^2
    A = A.copy()
    for i in range(n):
        q[i, i] = A[i, i]
        for j in range(i + 1, n):
            q[i, j] = A[i, j] / A[i, i]
        for j in range(i + 1, n):
            for k in range(j, n):
                A[j, k] -= q[i, j] * q[i, k] * q[i, i]
                A[k, j] = A[j, k]
    return q


def short_vectors(G, bound, *, shift=None, include_zero: bool = False):
    """All integer x with (x + shift) G (x + shift)^T <= bound, exactly.

    G is a positive definite rational Gram matrix (the form is x G x^T, not
    halved).  Enumeration is Fincke-Pohst on an LLL-reduced basis with a small
    floating point slack; every candidate is re-checked exactly.  Results are
    returned as (x, value) in the original coordinates.
    """
    n = len(G)
    Gr, U = lll_gram(G)
    U_int = [list(r) for r in U]
    # reduced coordinates y map back to x = y U
    if shift is not None:
        shift = [Fraction(s) for s in shift]
        # shift in reduced coordinates: s' with s' U = shift
        sU = _solve_rational(U_int, shift)
    else:
        sU = [Fraction(0)] * n
    q = _cholesky_float(Gr)
    B = float(bound) * (1 + 1e-9) + 1e-9
    Gf = [[Fraction(x) for x in r] for r in G]
    bound = Fraction(bound)
    out = []
    y = [0] * n
    sf = [float(s) for s in sU]

    def rec(i, rem):
        # center for coordinate i
        c = -sf[i]
        for j in range(i + 1, n):
            c -= q[i, j] * (y[j] + sf[j])
        if q[i, i] <= 0:
            raise ArithmeticError("form is not positive definite")
        r = math.sqrt(max(rem, 0.0) / q[i, i]) + 1e-9
        lo = math.ceil(c - r)
        hi = math.floor(c + r)
        for v in range(lo, hi + 1):
            y[i] = v
            t = v - c
            nr = rem - q[i, i] * t * t
            if nr < -1e-9 * (1 + B):
                continue
            if i == 0:
                x = [sum(y[k] * U_int[k][j] for k in range(n)) for j in range(n)]
                val = _qf(Gf, x, shift)
                if val <= bound and (include_zero or shift is not None or any(x)):
                    out.append((tuple(x), val))
            else:
                rec(i - 1, nr)
        y[i] = 0

    rec(n - 1, B)
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def _qf(G, x, shift=None):
    if shift is not None:
        x = [Fraction(a) + b for a, b in zip(x, shift)]
    n = len(x)
    s = Fraction(0)
    for i in range(n):
        if x[i]:
            for j in range(n):
                if x[j]:
                    s += x[i] * G[i][j] * x[j]
    return s


def _solve_rational(U, v):
    """s with s U = v for an invertible integer matrix U."""
    n = len(U)
    M = [[Fraction(U[j][i]) for j in range(n)] + [Fraction(v[i])] for i in range(n)]
    # Gaussian elimination on M (U^T s = v)
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def count_values(G, bound: int) -> tuple[int, ...]:
    """Theta counts: number of x with x G x^T / 2 = k for k = 1..bound (G even)."""
    counts = [0] * (bound + 1)
    for _, val in short_vectors(G, 2 * bound):
        k = val / 2
        if k.denominator == 1 and 1 <= k <= bound:
            counts[int(k)] += 1
    return tuple(counts[1:])
