"""The spectral cocycle and its derived quantities.

Cocycle matrices and log-renormalized products along the torus orbit
xi -> S^T xi (mod 1), twisted exponential sums over words, matrix Riesz
product densities, Fejer/Wiener functionals, diffraction, and the
constant-length partition identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .substitution import (
    Substitution,
    SuspensionParams,
    constant_length,
    fixed_point_prefix,
    perron_data,
    population_vector,
    seed_letter,
    substitution_matrix,
)


# ---------------------------------------------------------------------------
# encoding and data containers


@lru_cache(maxsize=128)
def _encoding(zeta: Substitution):
    """Positional encoding: entry k contributes exp(-2 pi i <pops[k], xi>)
    to cocycle-matrix entry (rows[k], cols[k])."""
    d = zeta.d
    rows, cols, pops = [], [], []
    for b, w in enumerate(zeta.rules):
        counts = np.zeros(d)
        for u in w:
            rows.append(b)
            cols.append(u)
            pops.append(counts.copy())
            counts[u] += 1.0
    return (
        np.array(pops, dtype=np.float64),
        np.array(rows, dtype=np.int64),
        np.array(cols, dtype=np.int64),
    )


@dataclass(frozen=True)
class CocycleProduct:
    """Log-renormalized cocycle product: full product = matrix * exp(log_scale)."""

    matrix: np.ndarray  # (d, d) complex, unit max-abs norm (zero if degenerate)
    log_scale: float  # -inf marks a zero product
    depth: int

    @property
    def value(self) -> np.ndarray:
        if math.isinf(self.log_scale):
            return np.zeros_like(self.matrix)
        return self.matrix * math.exp(self.log_scale)


@dataclass(frozen=True)
class DensityGrid:
    """Sampled density over a uniform closed-open frequency grid."""

    omegas: np.ndarray  # (m,)
    values: np.ndarray  # (m, d, d) complex Hermitian PSD, or (m,) real scalar
    level: int
    tokens: tuple[str, ...] = ()

    @property
    def is_scalar(self) -> bool:
        return self.values.ndim == 1

    def to_csv(self) -> str:
        lines = []
        if self.is_scalar:
            lines.append("omega,density")
            for w, v in zip(self.omegas, self.values):
                lines.append(f"{w:.17g},{v:.17g}")
        else:
            d = self.values.shape[1]
            labels = [str(t) for t in (self.tokens or range(d))]
            cols = [f"re_{labels[a]}{labels[b]},im_{labels[a]}{labels[b]}"
                    for a in range(d) for b in range(d)]
            lines.append("omega," + ",".join(cols))
            for w, V in zip(self.omegas, self.values):
                parts = [f"{w:.17g}"]
                for a in range(d):
                    for b in range(d):
                        parts.append(f"{V[a, b].real:.17g},{V[a, b].imag:.17g}")
                lines.append(",".join(parts))
        return "\n".join(lines) + "\n"


def uniform_grid(n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Closed-open uniform partition of [lo, hi) with n points."""
    if n < 1 or hi <= lo:
        raise PreconditionError("grid needs n >= 1 points and a nonempty interval")
    return lo + (hi - lo) * np.arange(n) / n


# ---------------------------------------------------------------------------
# cocycle matrices and products


def cocycle_matrix(zeta: Substitution, xi) -> np.ndarray:
    """Matrix of twisted prefix sums; equals S^T exactly at xi = 0."""
    pops, rows, cols = _encoding(zeta)
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape != (zeta.d,):
        raise PreconditionError(f"xi must be a {zeta.d}-vector")
    return _kernels.cocycle_matrices(pops, rows, cols, zeta.d, xi[None, :])[0]


def _product_along_orbit(zeta: Substitution, xi_batch: np.ndarray, n: int,
                         want_traj: bool = False):
    """Kernel call: products of depth n started at each row of xi_batch."""
    pops, rows, cols = _encoding(zeta)
    st = substitution_matrix(zeta).T.astype(np.float64)
    return _kernels.cocycle_products(pops, rows, cols, zeta.d, st,
                                     np.asarray(xi_batch, dtype=np.float64), n,
                                     want_traj)


def _check_line(zeta: Substitution, xi: np.ndarray, s=None) -> None:
    """det(S) = 0 restricts products to the line xi = omega * s."""
    from ._algebra import int_det

    if int_det(substitution_matrix(zeta)) != 0:
        return
    s = np.ones(zeta.d) if s is None else np.asarray(s, dtype=float)
    j = int(np.argmax(np.abs(s)))
    omega = xi[j] / s[j]
    if np.max(np.abs(xi - omega * s)) > 1e-9 * max(1.0, np.max(np.abs(xi))):
        raise PreconditionError(
            "the substitution matrix is singular: cocycle products are only "
            "defined along the line xi = omega * s (supply matching heights s)"
        )


def cocycle_product(zeta: Substitution, xi, n: int, s=None) -> CocycleProduct:
    """Product M((S^T)^{n-1} xi) ... M(xi) in log-renormalized form."""
    if n < 1:
        raise PreconditionError("product depth must be >= 1")
    xi = np.asarray(xi, dtype=np.float64)
    _check_line(zeta, xi, s)
    prod, logscale, _ = _product_along_orbit(zeta, xi[None, :], n)
    return CocycleProduct(matrix=prod[0], log_scale=float(logscale[0]), depth=n)


def twisted_sum(v, a: int, omega: float, s=None) -> complex:
    """Sum over occurrences of symbol a in v of exp(-2 pi i omega L_j),
    L_j the tiling length of the strict prefix v_0 ... v_{j-1}."""
    v = np.asarray(v, dtype=np.uint8)
    d = int(v.max()) + 1 if len(v) else 1
    if s is None:
        s = np.ones(d)
    s = np.asarray(s, dtype=float)
    lengths = np.concatenate([[0.0], np.cumsum(s[v])[:-1]])
    mask = v == a
    return complex(np.sum(np.exp(-2j * np.pi * omega * lengths[mask])))


def pi_matrix(zeta: Substitution, omega: float, n: int, k: int = 0,
              s: SuspensionParams | None = None) -> CocycleProduct:
    """Depth-n product along the orbit of omega * s, started k steps in.

    For k = 0, entry (b, a) equals the twisted sum of symbol a over the
    expanded word zeta^n(b).
    """
    if n < 1:
        raise PreconditionError("product depth must be >= 1")
    sv = np.ones(zeta.d) if s is None else np.asarray(s.heights, dtype=float)
    xi0 = np.mod(omega * sv, 1.0)
    st = substitution_matrix(zeta).T.astype(np.float64)
    for _ in range(k):
        xi0 = np.mod(st @ xi0, 1.0)
    prod, logscale, _ = _product_along_orbit(zeta, xi0[None, :], n)
    return CocycleProduct(matrix=prod[0], log_scale=float(logscale[0]), depth=n)


# ---------------------------------------------------------------------------
# Riesz-product densities


def _pi_products_on_grid(zeta: Substitution, omegas: np.ndarray, n: int,
                         sv: np.ndarray, k: int = 0):
    xi = np.mod(omegas[:, None] * sv[None, :], 1.0)
    if k:
        st = substitution_matrix(zeta).T.astype(np.float64)
        for _ in range(k):
            xi = np.mod(xi @ st.T, 1.0)
    return _product_along_orbit(zeta, xi, n)


def riesz_density(zeta: Substitution, n: int, grid: int | np.ndarray,
                  s: SuspensionParams | None = None, level_k: int = 0) -> DensityGrid:
    """Level-n matrix Riesz-product approximant of the correlation densities.

    Per omega: theta^{-n} conj(Pi_n^* Pi_n) / (<r, 1><1, l>), Hermitian PSD.
    """
    omegas = uniform_grid(grid) if isinstance(grid, int) else np.asarray(grid, float)
    d = zeta.d
    pf = perron_data(zeta)
    norm = float(pf.right.sum() * pf.left.sum())
    sv = np.ones(d) if s is None else np.asarray(s.heights, dtype=float)
    if n == 0:
        vals = np.broadcast_to(np.eye(d, dtype=np.complex128) / norm,
                               (len(omegas), d, d)).copy()
        return DensityGrid(omegas=omegas, values=vals, level=0, tokens=zeta.tokens)
    prod, logscale, _ = _pi_products_on_grid(zeta, omegas, n, sv, k=level_k)
    gram = np.conj(np.conj(prod).transpose(0, 2, 1) @ prod)  # conj(Pi^H Pi), normalized
    amp = np.exp(2.0 * np.where(np.isinf(logscale), -np.inf, logscale)
                 - n * math.log(pf.theta))
    vals = gram * amp[:, None, None] / norm
    vals[np.isinf(logscale)] = 0.0
    return DensityGrid(omegas=omegas, values=vals, level=n, tokens=zeta.tokens)


def contract_density(grid: DensityGrid, weights) -> DensityGrid:
    """Scalar density phi^T V conj(phi) from a matrix density (real, >= 0)."""
    if grid.is_scalar:
        raise PreconditionError("density is already scalar")
    w = np.asarray(weights, dtype=np.complex128)
    vals = np.einsum("a,mab,b->m", w, grid.values, np.conj(w)).real
    return DensityGrid(omegas=grid.omegas, values=vals, level=grid.level,
                       tokens=grid.tokens)


def tm_scalar_riesz(N: int, grid: int | np.ndarray) -> DensityGrid:
    """2^{-N} |prod_{n<N} (1 - e^{-2 pi i omega 2^n})|^2 on the grid."""
    if N > 40:
        raise PreconditionError("N <= 40")
    omegas = uniform_grid(grid) if isinstance(grid, int) else np.asarray(grid, float)
    vals = np.ones(len(omegas))
    for k in range(N):
        vals *= np.abs(1.0 - np.exp(-2j * np.pi * omegas * 2.0**k)) ** 2
    return DensityGrid(omegas=omegas, values=vals / 2.0**N, level=N)


@dataclass(frozen=True)
class TestFunction:
    """Cylindrical test function for the suspension flow.

    kind "simple": value b_j on the tile of letter j (closed-form transform
    per tile).  kind "level-k": indicator of the level-k supertile of a
    chosen letter.
    """

    kind: str  # "simple" | "level-k"
    weights: np.ndarray = None  # complex d-vector for "simple"
    letter: int = 0  # for "level-k"
    level: int = 0

    @classmethod
    def simple(cls, weights) -> "TestFunction":
        return cls(kind="simple", weights=np.asarray(weights, dtype=np.complex128))

    @classmethod
    def level_indicator(cls, letter: int, level: int) -> "TestFunction":
        return cls(kind="level-k", letter=letter, level=level)


def _tile_transform(b: complex, length: float, omegas: np.ndarray) -> np.ndarray:
    """Fourier transform of b * 1_[0, length): b (1 - e^{-2 pi i w L})/(2 pi i w)."""
    out = np.empty(len(omegas), dtype=np.complex128)
    nz = omegas != 0.0
    out[~nz] = b * length
    w = omegas[nz]
    out[nz] = b * (1.0 - np.exp(-2j * np.pi * w * length)) / (2j * np.pi * w)
    return out


def spectral_density_for_function(zeta: Substitution, s: SuspensionParams,
                                  f: TestFunction, n: int,
                                  grid: int | np.ndarray) -> DensityGrid:
    """Level-n scalar approximant of the spectral measure of f for the flow."""
    omegas = uniform_grid(grid) if isinstance(grid, int) else np.asarray(grid, float)
    pf = perron_data(zeta)
    sv = np.asarray(s.heights, dtype=float)
    norm = float((pf.right @ sv) * pf.left.sum())
    if f.kind == "simple":
        if f.weights is None or not np.any(f.weights):
            return DensityGrid(omegas=omegas, values=np.zeros(len(omegas)), level=n)
        prod, logscale, _ = _pi_products_on_grid(zeta, omegas, n, sv)
        psi = np.stack([_tile_transform(f.weights[j], sv[j], omegas)
                        for j in range(zeta.d)], axis=1)  # (m, d)
        col = np.einsum("mba,ma->mb", prod, psi)  # per-letter sums Pi psi-hat
        vals = np.einsum("mb,mb->m", np.conj(col), col).real
        amp = np.exp(2.0 * np.where(np.isinf(logscale), -np.inf, logscale)
                     - n * math.log(pf.theta))
        vals = vals * amp / norm
        vals[np.isinf(logscale)] = 0.0
        return DensityGrid(omegas=omegas, values=vals, level=n)
    if f.kind == "level-k":
        k = f.level
        st_k = np.linalg.matrix_power(substitution_matrix(zeta).T, k)
        sk = st_k.astype(float) @ sv  # level-k supertile lengths
        prod, logscale, _ = _pi_products_on_grid(zeta, omegas, n, sv, k=k)
        psi = _tile_transform(1.0, float(sk[f.letter]), omegas)
        col = psi[:, None] * prod[:, :, f.letter]
        vals = np.einsum("mb,mb->m", np.conj(col), col).real
        amp = np.exp(2.0 * np.where(np.isinf(logscale), -np.inf, logscale)
                     - n * math.log(pf.theta))
        vals = vals * amp / (norm * pf.theta**k)
        vals[np.isinf(logscale)] = 0.0
        return DensityGrid(omegas=omegas, values=vals, level=n)
    raise PreconditionError(f"unsupported test-function kind {f.kind!r}")


# ---------------------------------------------------------------------------
# Fejer / Wiener functionals on the fixed point


def gn_statistic(zeta: Substitution, weights, omega: float, N: int) -> float:
    """G_N = N^{-1} |sum_{j<N} phi(u_j) e^{-2 pi i omega j}|^2 on the fixed point."""
    if N > 10**7:
        raise PreconditionError("N <= 10^7")
    u = fixed_point_prefix(zeta, seed_letter(zeta), N)
    w = np.asarray(weights, dtype=np.complex128)
    phases = np.exp(-2j * np.pi * omega * np.arange(N))
    total = np.sum(w[u] * phases)
    return float(abs(total) ** 2 / N)


def ball_bound(zeta: Substitution, weights, omega: float, r: float) -> float:
    """Fejer-kernel upper bound for the spectral mass of the ball B(omega, r)."""
    if not 0 < r <= 0.5:
        raise PreconditionError("radius must lie in (0, 1/2]")
    N = max(1, math.floor(1.0 / (2.0 * r)))
    g = gn_statistic(zeta, weights, omega, N)
    return float(math.pi**2 / (4.0 * N) * g)


def point_mass_estimate(zeta: Substitution, weights, omega: float, N: int):
    """Wiener estimate N^{-1} G_N of the point mass at omega.

    Returns (value at the largest admissible depth, diagnostics over N, 2N, 4N).
    """
    diag = {}
    for mult in (1, 2, 4):
        Nm = N * mult
        if Nm > 10**7:
            break
        diag[Nm] = gn_statistic(zeta, weights, omega, Nm) / Nm
    return diag[max(diag)], diag


# ---------------------------------------------------------------------------
# suspension / diffraction / identities


def suspension_conversion(grid: DensityGrid) -> DensityGrid:
    """Multiply by the squared sinc factor relating shift and unit-roof flow."""
    w = grid.omegas
    factor = np.ones(len(w))
    nz = w != 0.0
    factor[nz] = (np.sin(np.pi * w[nz]) / (np.pi * w[nz])) ** 2
    if grid.is_scalar:
        vals = grid.values * factor
    else:
        vals = grid.values * factor[:, None, None]
    return DensityGrid(omegas=grid.omegas, values=vals, level=grid.level,
                       tokens=grid.tokens)


@dataclass(frozen=True)
class DiffractionResult:
    grid: DensityGrid
    point_count: int
    window: float
    mass_at_zero: float  # autocorrelation mass at distance 0 = density of points


def tile_left_endpoints(zeta: Substitution, s: SuspensionParams, a: int,
                        R: float) -> np.ndarray:
    """Left endpoints of a-tiles of the fixed-point tiling inside [0, R)."""
    sv = np.asarray(s.heights, dtype=float)
    mean_len = float(sv.mean())
    approx = int(R / sv.min()) + 2
    if approx > 10**7:
        raise PreconditionError("window too large for explicit expansion")
    u = fixed_point_prefix(zeta, seed_letter(zeta), approx)
    lengths = np.concatenate([[0.0], np.cumsum(sv[u])])
    lefts = lengths[:-1]
    mask = (u == a) & (lefts < R)
    return lefts[mask]


def diffraction_autocorrelation(zeta: Substitution, s: SuspensionParams, a: int,
                                R: float, grid: int | np.ndarray,
                                lo: float = 0.0, hi: float = 1.0) -> DiffractionResult:
    """Windowed diffraction of the a-tile point set: (1/R) |sum e^{-2 pi i w x}|^2."""
    sv = np.asarray(s.heights, dtype=float)
    if R < 10 * sv.max():
        raise PreconditionError("window must cover at least ~10 tiles")
    pts = tile_left_endpoints(zeta, s, a, R)
    if len(pts) == 0:
        raise PreconditionError("no tiles of the requested type in the window")
    omegas = uniform_grid(grid, lo, hi) if isinstance(grid, int) else np.asarray(grid, float)
    amps = np.exp(-2j * np.pi * np.outer(omegas, pts)).sum(axis=1)
    vals = np.abs(amps) ** 2 / R
    return DiffractionResult(
        grid=DensityGrid(omegas=omegas, values=vals, level=0),
        point_count=len(pts),
        window=R,
        mass_at_zero=len(pts) / R,
    )


def partition_identity_check(zeta: Substitution, grid: int = 4096) -> float:
    """Max deviation of sum_{j<q} P((omega+j)/q) from q for 2-letter bijective
    constant-length rules, P = |F|^2 / q with F the signed rule polynomial."""
    q = constant_length(zeta)
    if q is None or zeta.d != 2:
        raise PreconditionError("identity requires a 2-letter constant-length rule")
    from .classify import bijectivity

    kind, _ = bijectivity(zeta)
    if kind == "NotBijective":
        raise PreconditionError("identity requires a bijective substitution")
    u = np.asarray(zeta.rules[0], dtype=float)
    signs = 1.0 - 2.0 * u  # (-1)^{u_k}

    def P(w):
        F = (signs[None, :] * np.exp(-2j * np.pi * np.outer(w, np.arange(q)))).sum(axis=1)
        return np.abs(F) ** 2 / q

    omegas = uniform_grid(grid)
    total = np.zeros(len(omegas))
    for j in range(q):
        total += P((omegas + j) / q)
    return float(np.max(np.abs(total - q)))


def flow_twisted_integral(zeta: Substitution, s: SuspensionParams, weights,
                          omega: float, R: float) -> complex:
    """Integral of e^{-2 pi i omega t} f over [0, R] along the tiling orbit,
    summed tile by tile in closed form."""
    sv = np.asarray(s.heights, dtype=float)
    b = np.asarray(weights, dtype=np.complex128)
    approx = int(R / sv.min()) + 2
    if approx > 10**7:
        raise PreconditionError("R exceeds the expanded-prefix cap")
    u = fixed_point_prefix(zeta, seed_letter(zeta), approx)
    lengths = np.concatenate([[0.0], np.cumsum(sv[u])])
    lefts, rights = lengths[:-1], lengths[1:]
    keep = lefts < R
    lefts, rights, uu = lefts[keep], np.minimum(rights[keep], R), u[keep]
    if omega == 0.0:
        return complex(np.sum(b[uu] * (rights - lefts)))
    c = -2j * np.pi * omega
    return complex(np.sum(b[uu] * (np.exp(c * rights) - np.exp(c * lefts)) / c))
