"""Exact integer linear algebra helpers shared across modules.

Characteristic polynomials over the integers, irreducibility and factor
structure (sympy), high-precision eigenvalues (mpmath), cyclotomic-factor
detection.  Kept separate so substitution/classification code can share it
without circular imports.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

_x = sp.Symbol("x")


def char_poly(S: np.ndarray) -> sp.Poly:
    """Characteristic polynomial det(xI - S) with exact integer coefficients."""
    M = sp.Matrix(S.tolist())
    return sp.Poly(M.charpoly(_x).as_expr(), _x, domain="ZZ")


def int_det(S: np.ndarray) -> int:
    return int(sp.Matrix(S.tolist()).det())


def factor_list(poly: sp.Poly) -> list[tuple[sp.Poly, int]]:
    """Irreducible factorization over Q (content stripped)."""
    _, factors = poly.factor_list()
    return [(sp.Poly(f, _x, domain="ZZ"), m) for f, m in factors]


def poly_roots(poly: sp.Poly, dps: int = 50) -> list[complex]:
    """All complex roots to `dps` digits (returned as python complex)."""
    import mpmath as mp

    coeffs = [int(c) for c in poly.all_coeffs()]
    with mp.workdps(dps):
        roots = mp.polyroots(coeffs, maxsteps=200, extraprec=80)
    return [complex(r) for r in roots]


def dominant_factor(poly: sp.Poly, theta: float, dps: int = 50) -> sp.Poly:
    """The irreducible factor having theta as a root (minimal polynomial)."""
    best, best_val = None, None
    for f, _ in factor_list(poly):
        val = abs(np.polyval(np.array([float(c) for c in f.all_coeffs()]), theta))
        scale = max(1.0, abs(theta)) ** f.degree()
        if best_val is None or val / scale < best_val:
            best, best_val = f, val / scale
    return best


def is_pisot(poly_min: sp.Poly, dps: int = 50) -> bool:
    """Whether the dominant root of an irreducible integer polynomial is Pisot.

    Requires monic polynomial (algebraic integer); all non-dominant roots must
    have modulus < 1.  Moduli within 1e-9 of 1 are resolved exactly: a monic
    irreducible integer polynomial with a root on the unit circle is
    self-reciprocal (Kronecker), in which case the root is not inside the disc.
    """
    if int(poly_min.LC()) != 1:
        return False
    roots = sorted(poly_roots(poly_min, dps=dps), key=lambda z: -abs(z))
    if not roots or abs(roots[0]) <= 1 or abs(roots[0].imag) > 1e-20:
        return False
    for z in roots[1:]:
        m = abs(z)
        if m > 1 + 1e-9:
            return False
        if m > 1 - 1e-9:
            coeffs = poly_min.all_coeffs()
            if coeffs == coeffs[::-1]:  # self-reciprocal: root actually on the circle
                return False
            # otherwise the near-unit modulus is a numerical artifact only if
            # it is strictly inside; re-check at higher precision
            hi = sorted(poly_roots(poly_min, dps=2 * dps), key=lambda z: -abs(z))
            if any(abs(w) >= 1 - 10.0 ** (-dps) for w in hi[1:]):
                return False
    return True


def cyclotomic_eigenvalue_orders(poly: sp.Poly, d: int) -> list[int]:
    """Orders n with phi(n) <= d whose cyclotomic polynomial divides poly.

    A root-of-unity eigenvalue of a d x d integer matrix has order n with
    Euler phi(n) <= d, so this search is exhaustive.
    """
    orders = []
    n = 1
    while True:
        if sp.totient(n) > d:
            # phi(n) >= sqrt(n/2), so once phi exceeds d for all n up to 2(d+1)^2
            # there is nothing left to check
            if n > 2 * (d + 1) ** 2:
                break
            n += 1
            continue
        cyc = sp.Poly(sp.cyclotomic_poly(n, _x), _x, domain="ZZ")
        if sp.rem(poly.as_expr(), cyc.as_expr(), _x) == 0:
            orders.append(n)
        n += 1
    return orders


def divides(poly: sp.Poly, factor_coeffs: list[int]) -> bool:
    """Exact test: does the integer polynomial with these coefficients divide poly?"""
    fac = sp.Poly(factor_coeffs, _x, domain="ZZ")
    return sp.rem(poly.as_expr(), fac.as_expr(), _x) == 0
