"""Symbolic and algebraic classification of substitutions.

Constant length, height, Dekking coincidence, bijectivity, Pisot analysis,
the sqrt(q) singularity criterion, Pisot power distances, and Bernoulli
convolution Fourier products.  Verdicts always name the theorem that
produced them and never upgrade "inconclusive" silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import _algebra
from .errors import PreconditionError
from .substitution import (
    Substitution,
    aperiodicity_verdict,
    constant_length,
    fixed_point_prefix,
    is_primitive,
    perron_data,
    seed_letter,
    substitution_matrix,
)


@dataclass(frozen=True)
class HeightResult:
    q: int
    g0: int
    h: int
    confirmed: bool
    eigenvalue_group: str  # descriptor of e(Z(q) x Z/hZ)


@dataclass(frozen=True)
class ColumnSemigroup:
    generators: tuple[tuple[int, ...], ...]  # q maps, each a d-tuple a -> f_i(a)
    closure: frozenset[tuple[int, ...]]
    shortest: dict = field(default=None)  # map -> shortest composition length

    @property
    def has_constant(self) -> bool:
        return any(len(set(f)) == 1 for f in self.closure)


@dataclass(frozen=True)
class PisotReport:
    char_poly: tuple[int, ...]  # coefficients, highest degree first
    irreducible: bool
    eigenvalues: tuple[complex, ...]
    theta: float
    min_poly: tuple[int, ...]
    pf_is_pisot: bool
    irreducible_pisot: bool


@dataclass(frozen=True)
class Criterion:
    id: str
    verdict: str  # holds | fails | inconclusive | not-applicable
    theorem: str
    evidence: dict


@dataclass(frozen=True)
class SpectrumVerdict:
    criteria: tuple[Criterion, ...]
    headline: str


def height(zeta: Substitution, window: int = 64, scan_len: int = 200_000) -> HeightResult:
    """Height of a primitive aperiodic constant-length substitution.

    g0 is the gcd of positions of the first letter of the fixed point; the
    running gcd must be unchanged across `window` consecutive occurrences.
    h = max{n >= 1 : gcd(n, q) = 1, n | g0}.
    """
    q = constant_length(zeta)
    if q is None:
        raise PreconditionError("height requires a constant-length substitution")
    a = seed_letter(zeta)
    u = fixed_point_prefix(zeta, a, scan_len)
    pos = np.flatnonzero(u[1:] == u[0]) + 1
    g = 0
    stable = 0
    confirmed = False
    for p in pos:
        g_new = math.gcd(g, int(p))
        stable = stable + 1 if g_new == g else 0
        g = g_new
        if g == 1 or stable >= window:
            confirmed = True
            break
    h = max(n for n in range(1, g + 1) if math.gcd(n, q) == 1 and g % n == 0) if g else 1
    return HeightResult(
        q=q,
        g0=g if g else 1,
        h=h,
        confirmed=confirmed,
        eigenvalue_group=f"e(Z({q}) x Z/{h}Z)",
    )


def column_semigroup(zeta: Substitution) -> ColumnSemigroup:
    """Closure of the column maps f_i(a) = zeta(a)_i under composition.

    Compositions are explored breadth-first by length, so `shortest` records
    the minimal number of generators producing each map.
    """
    q = constant_length(zeta)
    if q is None:
        raise PreconditionError("column maps require a constant-length substitution")
    d = zeta.d
    gens = tuple(tuple(zeta.rules[a][i] for a in range(d)) for i in range(q))
    shortest: dict[tuple[int, ...], int] = {}
    frontier = set(gens)
    for f in frontier:
        shortest[f] = 1
    depth = 1
    while frontier:
        depth += 1
        if depth > d**d + 1:
            break
        nxt = set()
        for f in frontier:
            for g in gens:
                h = tuple(g[f[a]] for a in range(d))  # columns compose outermost-last
                if h not in shortest:
                    shortest[h] = depth
                    nxt.add(h)
        frontier = nxt
    return ColumnSemigroup(generators=gens, closure=frozenset(shortest), shortest=shortest)


def dekking_coincidence(zeta: Substitution) -> tuple[bool, int | None]:
    """Coincidence test: some column of some power is a constant map.

    Returns (found, shortest witnessing power k).  Requires primitive
    aperiodic constant length of height one.
    """
    hr = height(zeta)
    if hr.h != 1:
        raise PreconditionError(
            f"height is {hr.h} > 1; reduce to the pure base first (not performed here)"
        )
    sg = column_semigroup(zeta)
    consts = [f for f in sg.closure if len(set(f)) == 1]
    if not consts:
        return False, None
    return True, min(sg.shortest[f] for f in consts)


def bijectivity(zeta: Substitution) -> tuple[str, list[tuple[int, ...]]]:
    """One of NotBijective / Bijective / AbelianBijective, plus the columns."""
    q = constant_length(zeta)
    if q is None:
        raise PreconditionError("bijectivity requires a constant-length substitution")
    d = zeta.d
    cols = [tuple(zeta.rules[a][i] for a in range(d)) for i in range(q)]
    if not all(len(set(c)) == d for c in cols):
        return "NotBijective", cols
    for f in cols:
        for g in cols:
            if tuple(f[g[a]] for a in range(d)) != tuple(g[f[a]] for a in range(d)):
                return "Bijective", cols
    return "AbelianBijective", cols


def pisot_report(zeta: Substitution) -> PisotReport:
    """Exact characteristic polynomial, factor structure, and Pisot status."""
    ok, _ = is_primitive(zeta)
    if not ok:
        raise PreconditionError("Pisot report requires a primitive substitution")
    S = substitution_matrix(zeta)
    poly = _algebra.char_poly(S)
    factors = _algebra.factor_list(poly)
    irreducible = len(factors) == 1 and factors[0][1] == 1
    roots = _algebra.poly_roots(poly)
    theta = perron_data(zeta).theta
    minp = _algebra.dominant_factor(poly, theta)
    pf_pisot = _algebra.is_pisot(minp)
    # exact trace/det consistency guard
    tr, det = int(np.trace(S)), _algebra.int_det(S)
    assert abs(sum(roots).real - tr) < 1e-8 and abs(sum(roots).imag) < 1e-8
    prod = complex(np.prod(roots)) if roots else 1 + 0j
    assert abs(prod - det) < 1e-8 * max(1.0, abs(det))
    return PisotReport(
        char_poly=tuple(int(c) for c in poly.all_coeffs()),
        irreducible=irreducible,
        eigenvalues=tuple(sorted(roots, key=lambda z: -abs(z))),
        theta=theta,
        min_poly=tuple(int(c) for c in minp.all_coeffs()),
        pf_is_pisot=pf_pisot,
        irreducible_pisot=irreducible and pf_pisot,
    )


def weak_mixing_selfsimilar(zeta: Substitution) -> Criterion:
    """Self-similar suspension flow is weakly mixing iff theta is not Pisot."""
    rep = pisot_report(zeta)
    verdict = "holds" if not rep.pf_is_pisot else "fails"
    return Criterion(
        id="weak-mixing-self-similar",
        verdict=verdict,
        theorem="solomyak-self-similar-weak-mixing",
        evidence={
            "theta": rep.theta,
            "pf_is_pisot": rep.pf_is_pisot,
            "min_poly": list(rep.min_poly),
        },
    )


def sqrtq_singularity(zeta: Substitution) -> Criterion:
    """Singular maximal spectral type when no eigenvalue has modulus sqrt(q).

    Near-sqrt(q) moduli are resolved exactly: an eigenvalue of modulus
    sqrt(q) contributes an integer factor x^2 - q, x^2 - t x + q with
    |t| <= floor(2 sqrt(q)), or x -/+ m when q = m^2; divisibility of the
    characteristic polynomial by each candidate is tested in exact integer
    arithmetic.
    """
    q = constant_length(zeta)
    if q is None:
        raise PreconditionError("sqrt(q) criterion requires constant length")
    S = substitution_matrix(zeta)
    poly = _algebra.char_poly(S)
    sq = math.sqrt(q)
    witnesses = []
    candidates = [[1, 0, -q]]  # x^2 - q
    for t in range(-math.floor(2 * sq), math.floor(2 * sq) + 1):
        candidates.append([1, -t, q])  # x^2 - t x + q (conjugate pair of modulus sqrt q)
    m = math.isqrt(q)
    if m * m == q:
        candidates += [[1, -m], [1, m]]
    for c in candidates:
        if _algebra.divides(poly, c):
            witnesses.append(c)
    roots = _algebra.poly_roots(poly)
    near = [z for z in roots if abs(abs(z) - sq) < 1e-9]
    if witnesses:
        verdict = "inconclusive"  # modulus-sqrt(q) eigenvalue exists; criterion silent
    elif near:
        verdict = "inconclusive"  # numeric band without exact factor: do not decide
    else:
        verdict = "holds"
    return Criterion(
        id="sqrt-q-singularity",
        verdict=verdict,
        theorem="berlinkov-solomyak-sqrt-q",
        evidence={
            "q": q,
            "eigenvalue_moduli": [abs(z) for z in roots],
            "exact_sqrtq_factors": witnesses,
        },
    )


def bijective_two_letter_singularity(zeta: Substitution) -> Criterion:
    """Purely singular spectrum for bijective constant-length rules on 2 letters."""
    if zeta.d != 2:
        raise PreconditionError("criterion applies to 2-letter substitutions only")
    kind, _ = bijectivity(zeta)
    if kind == "NotBijective":
        raise PreconditionError("criterion requires a bijective substitution")
    from .cocycle import partition_identity_check

    dev = partition_identity_check(zeta, grid=4096)
    return Criterion(
        id="bijective-2-letter-singular",
        verdict="holds",
        theorem="bijective-two-letter-riesz-product",
        evidence={"partition_identity_deviation": dev},
    )


def spectrum_summary(zeta: Substitution) -> SpectrumVerdict:
    """Run every applicable criterion and aggregate with explicit precedence.

    An exact discrete verdict (coincidence) takes precedence over the
    singularity criterion in the headline; all criteria stay listed.
    """
    ok, _ = is_primitive(zeta)
    if not ok:
        raise PreconditionError("spectrum summary requires a primitive substitution")
    crits: list[Criterion] = []
    ap = aperiodicity_verdict(zeta)
    crits.append(
        Criterion(
            id="aperiodicity",
            verdict={"Aperiodic": "holds", "Periodic": "fails"}.get(ap.status, "inconclusive"),
            theorem="pansiot-aperiodicity",
            evidence={"status": ap.status, "reason": ap.reason, "tests": list(ap.tests_run)},
        )
    )
    q = constant_length(zeta)
    headline = "no definite verdict"
    if q is not None and ap.status == "Aperiodic":
        hr = height(zeta)
        crits.append(
            Criterion(
                id="height",
                verdict="holds" if hr.confirmed else "inconclusive",
                theorem="constant-length-height",
                evidence={
                    "q": hr.q,
                    "g0": hr.g0,
                    "h": hr.h,
                    "eigenvalue_group": hr.eigenvalue_group,
                    "confirmed": hr.confirmed,
                },
            )
        )
        kind, cols = bijectivity(zeta)
        crits.append(
            Criterion(
                id="bijectivity",
                verdict="holds" if kind != "NotBijective" else "fails",
                theorem="bijective-columns",
                evidence={"kind": kind, "columns": [list(c) for c in cols]},
            )
        )
        if hr.h == 1:
            found, k = dekking_coincidence(zeta)
            crits.append(
                Criterion(
                    id="dekking-coincidence",
                    verdict="holds" if found else "fails",
                    theorem="dekking-coincidence",
                    evidence={"witness_power": k},
                )
            )
            if found:
                headline = f"purely discrete spectrum (coincidence at power {k})"
        sqc = sqrtq_singularity(zeta)
        crits.append(sqc)
        if headline == "no definite verdict" and sqc.verdict == "holds":
            headline = "singular maximal spectral type"
        if zeta.d == 2 and kind != "NotBijective":
            crits.append(bijective_two_letter_singularity(zeta))
            headline = "purely singular spectrum (bijective 2-letter)"
    rep = pisot_report(zeta)
    crits.append(
        Criterion(
            id="irreducible-pisot",
            verdict="holds" if rep.irreducible_pisot else "fails",
            theorem="pisot-definition",
            evidence={
                "char_poly": list(rep.char_poly),
                "irreducible": rep.irreducible,
                "pf_is_pisot": rep.pf_is_pisot,
            },
        )
    )
    crits.append(weak_mixing_selfsimilar(zeta))
    if headline == "no definite verdict" and rep.irreducible_pisot:
        headline = "Pisot case: not weakly mixing; pure discreteness open"
    return SpectrumVerdict(criteria=tuple(crits), headline=headline)


def pisot_power_distances(a: int, b: int, x_p: int = 1, x_q: int = 0, K: int = 40):
    """Distances ||theta^k * x|| for theta the dominant root of t^2 = a t + b.

    x = x_p + x_q * theta ranges over Z[theta].  Uses the exact integer trace
    recurrence s_k = a s_{k-1} + b s_{k-2} for s_k = x theta^k + x' theta'^k,
    so ||theta^k x|| = ||x' theta'^k|| without float cancellation.
    """
    if K > 60:
        raise PreconditionError("K <= 60")
    disc = a * a + 4 * b
    if disc <= 0 or math.isqrt(disc) ** 2 == disc:
        raise PreconditionError("needs an irrational quadratic with real roots")
    sqd = math.sqrt(disc)
    theta = (a + sqd) / 2
    theta_c = (a - sqd) / 2
    if abs(theta) <= 1:
        raise PreconditionError("dominant root must exceed 1 in modulus")
    # theta^k x + theta'^k x' satisfies the integer recurrence s_k = a s_{k-1} + b s_{k-2}
    # with integer seeds s_0 = 2 x_p + a x_q, s_1 = a x_p + (a^2 + 2b) x_q, so
    # theta^k x is an integer minus theta'^k x' and only the conjugate term matters.
    xc = x_p + x_q * theta_c
    out = []
    for k in range(K + 1):
        frac = -xc * theta_c**k
        out.append(abs(frac - round(frac)))
    return np.array(out), theta, theta_c


def bernoulli_fourier(lam: float, p: float, xi: float, N: int) -> tuple[complex, float]:
    """Partial Fourier product of the (biased) Bernoulli convolution.

    Returns (product over n < N of p e^{-2 pi i lam^n xi} + (1-p) e^{2 pi i lam^n xi},
    tail bound 2 pi |xi| lam^N / (1 - lam)).
    """
    if not (0 < lam < 1 and 0 < p < 1):
        raise PreconditionError("need lambda, p in (0,1)")
    if N > 10_000:
        raise PreconditionError("N <= 10^4")
    n = np.arange(N)
    ph = 2.0 * np.pi * (lam**n) * xi
    factors = p * np.exp(-1j * ph) + (1.0 - p) * np.exp(1j * ph)
    tail = 2.0 * np.pi * abs(xi) * lam**N / (1.0 - lam)
    return complex(np.prod(factors)), float(tail)
