"""Lyapunov-exponent estimation for the spectral cocycle and its consequences:
singularity verdicts, local spectral dimensions, the return-word decay
diagnostic, and the eigenvalue scan over frequency ranges."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import _algebra
from .classify import Criterion, PisotReport
from .cocycle import (
    TestFunction,
    _check_line,
    _product_along_orbit,
    _tile_transform,
    cocycle_matrix,
)
from .errors import NumericalError, PreconditionError
from .substitution import (
    Substitution,
    SuspensionParams,
    good_return_words,
    perron_data,
    population_vector,
    substitution_matrix,
)


@dataclass(frozen=True)
class PointwiseExponent:
    depths: np.ndarray  # 1..n_max
    values: np.ndarray  # (1/n) log ||product|| (or ||product z||); -inf if degenerate
    proxy: float  # max over the last 20% of depths


@dataclass(frozen=True)
class ExponentEstimate:
    estimates: np.ndarray  # per depth k = 1..K
    stderrs: np.ndarray
    samples: int
    seed: int
    degenerate: int
    value: float  # min over k
    value_stderr: float
    theta: float


@dataclass(frozen=True)
class DimensionReport:
    omega: float
    exponent: float
    dimension: float | None  # None for the ">= 2" branch
    branch: str  # "atom" | "finite" | "ge2" | "unresolved"
    detail: str = ""


@dataclass(frozen=True)
class EigenvalueScanResult:
    omegas: np.ndarray
    max_distance_last5: np.ndarray
    candidate: np.ndarray  # bool
    depth: int
    epsilon: float
    return_words: tuple[tuple[int, ...], ...]


def pointwise_exponent(zeta: Substitution, xi, n_max: int, z=None,
                       s=None) -> PointwiseExponent:
    """Finite-depth exponents (1/n) log ||M(xi, n)|| for n = 1..n_max.

    With z supplied, the vector norm ||M(xi, n) z|| is used instead.  The
    limsup proxy is the max over the last 20% of depths.
    """
    if n_max > 10**4:
        raise PreconditionError("n_max <= 10^4")
    xi = np.asarray(xi, dtype=np.float64)
    _check_line(zeta, xi, s)
    if z is None:
        _, _, traj = _product_along_orbit(zeta, xi[None, :], n_max, want_traj=True)
        lognorms = traj[0]
    else:
        z = np.asarray(z, dtype=np.complex128)
        if not np.any(z):
            raise PreconditionError("z must be nonzero")
        st = substitution_matrix(zeta).T.astype(np.float64)
        cur = np.mod(xi, 1.0)
        vec = z.copy()
        vlog = 0.0
        lognorms = np.full(n_max, -np.inf)
        for t in range(n_max):
            vec = cocycle_matrix(zeta, cur) @ vec
            nv = float(np.linalg.norm(vec))
            if nv == 0.0:
                break
            vec /= nv
            vlog += math.log(nv)
            lognorms[t] = vlog
            cur = np.mod(st @ cur, 1.0)
    depths = np.arange(1, n_max + 1)
    values = lognorms / depths
    tail = values[-max(1, n_max // 5):]
    return PointwiseExponent(depths=depths, values=values, proxy=float(np.max(tail)))


def _check_global_preconditions(zeta: Substitution) -> None:
    S = substitution_matrix(zeta)
    det = _algebra.int_det(S)
    if det == 0:
        raise PreconditionError(
            "global exponent requires det(S) != 0 (torus endomorphism must be "
            "nonsingular); det = 0"
        )
    poly = _algebra.char_poly(S)
    orders = _algebra.cyclotomic_eigenvalue_orders(poly, zeta.d)
    if orders:
        raise PreconditionError(
            "substitution matrix has root-of-unity eigenvalues (cyclotomic "
            f"factors of order {orders}); the ergodic sampling argument fails"
        )


def global_exponent(zeta: Substitution, K: int, samples: int,
                    seed: int = 1) -> ExponentEstimate:
    """Quasi-Monte Carlo estimate of inf_k (1/k) E log ||M(xi, k)||.

    Samples are a scrambled Halton sequence on [0,1)^d; each depth-k average
    is a consistent estimator of an upper bound for the exponent, and the
    reported value is the min over depths.  Deterministic for a fixed seed.
    """
    if not 1 <= K <= 8:
        raise PreconditionError("1 <= K <= 8")
    if not 1 <= samples <= 10**6:
        raise PreconditionError("1 <= samples <= 10^6")
    _check_global_preconditions(zeta)
    from scipy.stats import qmc

    xi = qmc.Halton(d=zeta.d, scramble=True, seed=seed).random(samples)
    _, _, traj = _product_along_orbit(zeta, xi, K, want_traj=True)
    degenerate = int(np.sum(np.isinf(traj[:, -1])))
    if degenerate > 0.001 * samples:
        raise NumericalError(
            f"{degenerate} of {samples} samples hit a zero product (> 0.1%)"
        )
    good = ~np.isinf(traj[:, -1])
    depths = np.arange(1, K + 1)
    per_sample = traj[good] / depths  # (m_good, K)
    estimates = per_sample.mean(axis=0)
    stderrs = per_sample.std(axis=0, ddof=1) / math.sqrt(per_sample.shape[0])
    k_min = int(np.argmin(estimates))
    return ExponentEstimate(
        estimates=estimates,
        stderrs=stderrs,
        samples=samples,
        seed=seed,
        degenerate=degenerate,
        value=float(estimates[k_min]),
        value_stderr=float(stderrs[k_min]),
        theta=perron_data(zeta).theta,
    )


def singularity_verdict_irreducible(zeta: Substitution, est: ExponentEstimate,
                                    report: PisotReport | None = None) -> Criterion:
    """Singular spectrum when the exponent estimate sits below (log theta)/2.

    Requires an irreducible characteristic polynomial; the verdict is
    "singular" iff value + 3 SE < (log theta)/2, otherwise "inconclusive"
    (never "absolutely continuous").
    """
    if report is None:
        from .classify import pisot_report

        report = pisot_report(zeta)
    threshold = 0.5 * math.log(est.theta)
    if not report.irreducible:
        return Criterion(
            id="lyapunov-singularity",
            verdict="not-applicable",
            theorem="bufetov-solomyak-lyapunov-singularity",
            evidence={"reason": "characteristic polynomial reducible over Q",
                      "char_poly": list(report.char_poly)},
        )
    fires = est.value + 3.0 * est.value_stderr < threshold
    return Criterion(
        id="lyapunov-singularity",
        verdict="holds" if fires else "inconclusive",
        theorem="bufetov-solomyak-lyapunov-singularity",
        evidence={
            "estimate": est.value,
            "stderr": est.value_stderr,
            "threshold_half_log_theta": threshold,
            "samples": est.samples,
            "seed": est.seed,
        },
    )


def local_dimension(zeta: Substitution, s: SuspensionParams, f: TestFunction,
                    omega: float, n_max: int = 200) -> DimensionReport:
    """Lower local dimension proxy 2 - 2 chi / log theta at frequency omega.

    chi is the finite-depth exponent of the cocycle along xi = omega * s
    applied to z = (psi-hat_j(omega))_j; a nonpositive chi reports the
    ">= 2" branch.
    """
    if f.kind != "simple":
        raise PreconditionError("local dimension requires a simple cylindrical f")
    sv = np.asarray(s.heights, dtype=float)
    w = np.asarray([omega])
    z = np.array([
        _tile_transform(f.weights[j], sv[j], w)[0] for j in range(zeta.d)
    ])
    if not np.any(np.abs(z) > 1e-14):
        raise PreconditionError("transform vector z vanishes at this frequency")
    xi = np.mod(omega * sv, 1.0)
    pe = pointwise_exponent(zeta, xi, n_max, z=z, s=sv)
    theta = perron_data(zeta).theta
    chi = pe.proxy
    if math.isinf(chi) or chi <= 0.0:
        return DimensionReport(omega=omega, exponent=chi, dimension=None,
                               branch="ge2", detail="nonpositive finite-depth exponent")
    dim = 2.0 - 2.0 * chi / math.log(theta)
    return DimensionReport(omega=omega, exponent=chi,
                           dimension=float(min(2.0, max(0.0, dim))),
                           branch="finite",
                           detail=f"finite-depth proxy at n_max={n_max}")


def dimension_at_zero(zeta: Substitution, s: SuspensionParams,
                      f: TestFunction) -> DimensionReport:
    """Closed-form local dimension at omega = 0 from the spectral projections
    of S^T applied to z = (b_j s_j)_j, grouped by eigenvalue modulus."""
    if f.kind != "simple":
        raise PreconditionError("requires a simple cylindrical f")
    sv = np.asarray(s.heights, dtype=float)
    z = np.asarray(f.weights, dtype=np.complex128) * sv
    if not np.any(np.abs(z) > 1e-14):
        raise PreconditionError("z = 0")
    st = substitution_matrix(zeta).T.astype(float)
    evals, Q = np.linalg.eig(st)
    if np.linalg.cond(Q) > 1e9:
        return DimensionReport(omega=0.0, exponent=float("nan"), dimension=None,
                               branch="unresolved",
                               detail="eigenvector matrix ill-conditioned")
    coords = np.linalg.solve(Q, z)
    order = np.argsort(-np.abs(evals))
    moduli = np.abs(evals)[order]
    # group eigenvalues whose moduli agree to 1e-9
    groups: list[list[int]] = []
    for pos, idx in enumerate(order):
        if groups and abs(moduli[pos] - np.abs(evals[groups[-1][0]])) < 1e-9:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    zn = np.linalg.norm(z)
    theta = perron_data(zeta).theta
    for j, grp in enumerate(groups, start=1):
        pz = Q[:, grp] @ coords[grp]
        if np.linalg.norm(pz) > 1e-9 * zn:
            mod = float(np.abs(evals[grp[0]]))
            if j == 1:
                return DimensionReport(omega=0.0, exponent=math.log(theta),
                                       dimension=0.0, branch="atom",
                                       detail="nonzero projection on the PF direction")
            if mod > 1.0:
                dim = 2.0 - 2.0 * math.log(mod) / math.log(theta)
                return DimensionReport(omega=0.0, exponent=math.log(mod),
                                       dimension=float(dim), branch="finite",
                                       detail=f"first live eigenvalue group {j}")
            return DimensionReport(omega=0.0, exponent=math.log(mod) if mod > 0 else -math.inf,
                                   dimension=None, branch="ge2",
                                   detail=f"first live eigenvalue modulus {mod:.6g} <= 1")
    return DimensionReport(omega=0.0, exponent=-math.inf, dimension=None,
                           branch="ge2", detail="z vanishes on all eigenspaces")


def _exact_length_table(zeta: Substitution, s: SuspensionParams,
                        words, K: int) -> np.ndarray:
    """Tiling lengths |zeta^k(v)|_s = <l(v), (S^T)^k s> for k = 0..K.

    Computed as exact-integer matrix iterations against a high-precision
    copy of s, then rounded once to extended precision, so mod-1 distances
    stay meaningful even when the lengths reach theta^40.
    """
    st = substitution_matrix(zeta).T.tolist()  # integer rows
    d = zeta.d
    pops = [population_vector(np.asarray(v, dtype=np.uint8), d) for v in words]
    out = np.zeros((len(words), K + 1), dtype=np.longdouble)
    with mp.workdps(60):
        vec = [mp.mpf(x) for x in s.heights_mp]
        for k in range(K + 1):
            for i, p in enumerate(pops):
                t = mp.fsum(int(p[j]) * vec[j] for j in range(d))
                out[i, k] = np.longdouble(mp.nstr(t, 30))
            vec = [mp.fsum(st[i][j] * vec[j] for j in range(d)) for i in range(d)]
    return out


def return_word_bound(zeta: Substitution, s: SuspensionParams, v, omega: float,
                      n: int, c1: float = 0.5) -> float:
    """Decay diagnostic prod_{k<n} (1 - c1 ||omega |zeta^k(v)|_s||^2).

    The constant c1 is user-supplied; this is a qualitative profile, not a
    proven bound.
    """
    if not 0.0 < c1 < 1.0:
        raise PreconditionError("c1 must lie in (0,1)")
    _, good = good_return_words(zeta, max_len=len(v) + 1)
    if tuple(int(x) for x in v) not in good:
        raise PreconditionError("v is not a good return word for this substitution")
    table = _exact_length_table(zeta, s, [tuple(int(x) for x in v)], n - 1)[0]
    x = np.longdouble(omega) * table
    dist = np.abs(x - np.rint(x)).astype(float)
    return float(np.prod(1.0 - c1 * dist**2))


def eigenvalue_scan(zeta: Substitution, s: SuspensionParams, lo: float, hi: float,
                    grid: int, K: int = 12, epsilon: float = 0.02,
                    max_word_len: int = 6) -> EigenvalueScanResult:
    """Frequency scan for continuous-eigenvalue candidates.

    omega is flagged when max over return words v of ||omega |zeta^k(v)|_s||
    stays below epsilon for the last 5 depths k <= K.  The eigenvalue
    condition quantifies over every return word, so the whole harvested set
    is used.  Candidates are numerical, not proofs.
    """
    if K > 40:
        raise PreconditionError("K <= 40 (exact length table)")
    if hi <= lo or grid < 1:
        raise PreconditionError("empty frequency range")
    from .substitution import return_words

    found = return_words(zeta, max_word_len)
    if not found:
        raise PreconditionError("no return words found within bounds")
    words = sorted(found)
    last = max(1, min(5, K))
    table = _exact_length_table(zeta, s, words, K)[:, K + 1 - last:]
    omegas = lo + (hi - lo) * np.arange(grid) / grid
    wl = omegas.astype(np.longdouble)
    maxdist = np.zeros(grid)
    for row in table:
        for t in row:
            x = wl * t
            dist = np.abs(x - np.rint(x)).astype(float)
            np.maximum(maxdist, dist, out=maxdist)
    cand = maxdist < epsilon
    return EigenvalueScanResult(
        omegas=omegas, max_distance_last5=maxdist, candidate=cand,
        depth=K, epsilon=epsilon, return_words=tuple(words),
    )


def chi_upper_bound_check(zeta: Substitution, trials: int = 1000, n: int = 200,
                          seed: int = 1) -> float:
    """Max over random xi of (1/n) log ||M(xi, n)|| - log theta.

    Must stay below a small finite-depth slack (~3e-2).  When det(S) = 0 the
    samples are drawn from the omega * 1 line.
    """
    rng = np.random.default_rng(seed)
    S = substitution_matrix(zeta)
    if _algebra.int_det(S) == 0:
        xi = np.mod(rng.random(trials)[:, None] * np.ones(zeta.d)[None, :], 1.0)
    else:
        xi = rng.random((trials, zeta.d))
    _, _, traj = _product_along_orbit(zeta, xi, n, want_traj=True)
    final = traj[:, -1]
    final = final[~np.isinf(final)]
    theta = perron_data(zeta).theta
    if len(final) == 0:
        return -math.inf
    return float(np.max(final) / n - math.log(theta))
