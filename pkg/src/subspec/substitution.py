"""Exact combinatorics of substitutions.

Rules, iteration, substitution matrices, Perron-Frobenius data, fixed-point
prefixes, aperiodicity, return words and tiling lengths.  Words are numpy
uint8 arrays (alphabets are small); everything here is pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NumericalError, PreconditionError, RuleError

# Explicit word expansion beyond this length must route through matrix
# identities instead (rule words grow like theta^n).
WORD_CAP = 10_000_000


def _as_word(symbols) -> np.ndarray:
    w = np.asarray(symbols, dtype=np.uint8)
    if w.ndim != 1:
        raise RuleError("a word must be a flat sequence of symbols")
    return w


@dataclass(frozen=True)
class Substitution:
    """A map from letters to nonempty words over a finite alphabet.

    ``tokens[i]`` is the display token of symbol ``i``; ``rules[i]`` is the
    image word of symbol ``i`` as a tuple of symbol indices.
    """

    tokens: tuple[str, ...]
    rules: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = len(self.tokens)
        if d == 0:
            raise RuleError("empty alphabet")
        if len(set(self.tokens)) != d:
            raise RuleError("display tokens must be unique")
        if len(self.rules) != d:
            raise RuleError("need exactly one rule per symbol")
        for b, w in enumerate(self.rules):
            if len(w) == 0:
                raise RuleError(f"empty rule word for symbol {self.tokens[b]!r}")
            for c in w:
                if not 0 <= c < d:
                    raise RuleError(f"rule for {self.tokens[b]!r} uses unknown symbol index {c}")

    @property
    def d(self) -> int:
        return len(self.tokens)

    @cached_property
    def _rule_flat(self):
        flat = np.concatenate([np.asarray(w, dtype=np.uint8) for w in self.rules])
        lens = np.array([len(w) for w in self.rules], dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(lens)[:-1]])
        return flat, starts, lens

    def apply(self, word, cap: int = WORD_CAP) -> np.ndarray:
        """Image of a word under the substitution (concatenation of rules)."""
        w = _as_word(word)
        flat, starts, lens = self._rule_flat
        out_lens = lens[w]
        total = int(out_lens.sum())
        if total > cap:
            raise PreconditionError(f"expanded word length {total} exceeds cap {cap}")
        if total == 0:
            return np.empty(0, dtype=np.uint8)
        offs = np.repeat(np.cumsum(out_lens) - out_lens, out_lens)
        idx = np.repeat(starts[w], out_lens) + (np.arange(total) - offs)
        return flat[idx]

    def power(self, n: int, cap: int = WORD_CAP) -> "Substitution":
        """The substitution with rules b -> zeta^n(b)."""
        if n < 1:
            raise PreconditionError("power requires n >= 1")
        cur = self
        for _ in range(n - 1):
            cur = Substitution(
                self.tokens,
                tuple(tuple(self.apply(w, cap=cap).tolist()) for w in cur.rules),
            )
        return cur

    def compose(self, other: "Substitution") -> "Substitution":
        """(self o other)(b) = self(other(b)); alphabets must match in size."""
        if self.d != other.d:
            raise PreconditionError("composition requires a shared alphabet")
        return Substitution(
            self.tokens,
            tuple(tuple(self.apply(w).tolist()) for w in other.rules),
        )

    def word_str(self, word) -> str:
        sep = "" if all(len(t) == 1 for t in self.tokens) else " "
        return sep.join(self.tokens[c] for c in _as_word(word))

    def rule_lines(self) -> list[str]:
        return [
            f"{self.tokens[b]} -> " + " ".join(self.tokens[c] for c in w)
            for b, w in enumerate(self.rules)
        ]


def parse_substitution(text: str) -> Substitution:
    """Parse the rule DSL.

    Lines: optional ``alphabet = tok1 tok2 ...``, then one rule per line
    ``tok -> tok tok ...``; ``#`` starts a comment.  Single-character tokens
    may be written unspaced on the right-hand side (``0 -> 01``).
    """
    declared: list[str] | None = None
    raw_rules: list[tuple[int, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            lhs, rhs = line.split("->", 1)
            lhs_toks = lhs.split()
            if len(lhs_toks) != 1:
                raise RuleError(f"line {lineno}: rule left-hand side must be a single token")
            rhs_toks = rhs.split()
            if not rhs_toks:
                raise RuleError(f"line {lineno}: empty rule word for {lhs_toks[0]!r}")
            raw_rules.append((lineno, lhs_toks[0], rhs_toks))
        elif line.replace(" ", "").startswith("alphabet="):
            declared = line.split("=", 1)[1].split()
            if not declared:
                raise RuleError(f"line {lineno}: empty alphabet declaration")
        else:
            raise RuleError(f"line {lineno}: cannot parse {line!r}")

    if not raw_rules:
        raise RuleError("no rules found")
    lhs_order = []
    for lineno, lhs, _ in raw_rules:
        if lhs in lhs_order:
            raise RuleError(f"line {lineno}: duplicate rule for symbol {lhs!r}")
        lhs_order.append(lhs)
    tokens = tuple(declared) if declared is not None else tuple(lhs_order)
    index = {t: i for i, t in enumerate(tokens)}
    for lineno, lhs, _ in raw_rules:
        if lhs not in index:
            raise RuleError(f"line {lineno}: unknown symbol token {lhs!r}")
    if set(lhs_order) != set(tokens):
        missing = [t for t in tokens if t not in lhs_order]
        raise RuleError(f"missing rule for symbol(s): {', '.join(missing)}")

    rules: list[tuple[int, ...]] = [()] * len(tokens)
    for lineno, lhs, rhs_toks in raw_rules:
        word: list[int] = []
        for tok in rhs_toks:
            if tok in index:
                word.append(index[tok])
            elif len(tok) > 1 and all(ch in index for ch in tok):
                word.extend(index[ch] for ch in tok)  # unspaced single-char tokens
            else:
                raise RuleError(f"line {lineno}: unknown symbol token {tok!r}")
        rules[index[lhs]] = tuple(word)
    return Substitution(tokens, tuple(rules))


def substitution_matrix(zeta: Substitution) -> np.ndarray:
    """d x d integer matrix; entry (i, j) counts symbol i in zeta(j)."""
    d = zeta.d
    S = np.zeros((d, d), dtype=np.int64)
    for j, w in enumerate(zeta.rules):
        S[:, j] = np.bincount(np.asarray(w), minlength=d)
    return S


def population_vector(word, d: int) -> np.ndarray:
    """Letter counts of a word as an integer d-vector."""
    return np.bincount(_as_word(word), minlength=d).astype(np.int64)


def tiling_length(word, heights) -> float:
    """<l(word), s>: total length of the word's tiles under heights s."""
    w = _as_word(word)
    s = np.asarray(heights, dtype=float)
    return float(population_vector(w, len(s)) @ s)


def is_primitive(zeta: Substitution) -> tuple[bool, int | None]:
    """Whether some power of the matrix is entrywise positive.

    Uses the sharp Wielandt bound d^2 - 2d + 2 on the witnessing exponent;
    returns (True, smallest such n) or (False, None).
    """
    S = substitution_matrix(zeta)
    d = zeta.d
    bound = d * d - 2 * d + 2
    P = (S > 0).astype(np.int8)
    B = P.copy()
    for n in range(1, bound + 1):
        if B.all():
            return True, n
        B = ((B.astype(np.int64) @ P) > 0).astype(np.int8)
    return False, None


@dataclass(frozen=True)
class PerronData:
    """Dominant eigenvalue theta with right/left eigenvectors, <r, l> = 1."""

    theta: float
    right: np.ndarray
    left: np.ndarray
    frequencies: np.ndarray = field(default=None)  # right rescaled to sum 1


def _power_iteration(M: np.ndarray, tol: float = 1e-14, max_iter: int = 100_000):
    v = np.ones(M.shape[0]) / math.sqrt(M.shape[0])
    theta = 0.0
    for _ in range(max_iter):
        w = M @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            raise NumericalError("power iteration hit the zero vector")
        v_new = w / nw
        theta_new = float(v_new @ (M @ v_new))
        resid = np.linalg.norm(M @ v_new - theta_new * v_new)
        if resid <= tol * max(1.0, abs(theta_new)):
            return theta_new, v_new
        theta, v = theta_new, v_new
    raise NumericalError("power iteration did not converge")


def perron_data(zeta: Substitution) -> PerronData:
    """Perron-Frobenius eigenvalue and eigenvectors of the substitution matrix."""
    ok, _ = is_primitive(zeta)
    if not ok:
        raise PreconditionError("Perron data requires a primitive substitution")
    S = substitution_matrix(zeta).astype(float)
    theta, r = _power_iteration(S)
    _, l = _power_iteration(S.T)
    r = np.abs(r)
    l = np.abs(l)
    l = l / (r @ l)
    resid_r = np.linalg.norm(S @ r - theta * r)
    resid_l = np.linalg.norm(S.T @ l - theta * l)
    if max(resid_r, resid_l) > 1e-12 * theta * max(np.linalg.norm(r), np.linalg.norm(l)):
        raise NumericalError("Perron-Frobenius residual too large")
    return PerronData(theta=theta, right=r, left=l, frequencies=r / r.sum())


@dataclass(frozen=True)
class SuspensionParams:
    """Tile heights for the suspension (tiling) flow.

    ``heights`` is the float vector used in fast paths; ``heights_mp`` keeps a
    high-precision copy (mpmath) when the heights are irrational, so that long
    tiling lengths <l(v), (S^T)^k s> keep enough correct digits.
    """

    heights: np.ndarray
    heights_mp: tuple = None
    mode: str = "explicit"

    @classmethod
    def unit(cls, d: int) -> "SuspensionParams":
        return cls(heights=np.ones(d), heights_mp=tuple(1 for _ in range(d)), mode="unit")

    @classmethod
    def explicit(cls, heights) -> "SuspensionParams":
        h = np.asarray(heights, dtype=float)
        if h.ndim != 1 or (h <= 0).any():
            raise PreconditionError("heights must be a strictly positive vector")
        return cls(heights=h, heights_mp=tuple(float(x) for x in h), mode="explicit")

    @classmethod
    def self_similar(cls, zeta: Substitution, dps: int = 60) -> "SuspensionParams":
        """PF eigenvector of S^T (normalized to sum 1), computed to `dps` digits."""
        import mpmath as mp

        S = substitution_matrix(zeta)
        with mp.workdps(dps + 10):
            M = mp.matrix(S.T.tolist())
            v = mp.matrix([mp.mpf(1)] * zeta.d)
            # ratio of moduli of the top two eigenvalues governs convergence;
            # iterate until the Rayleigh quotient stabilizes to working precision
            prev = mp.mpf(0)
            for _ in range(100_000):
                w = M * v
                nrm = mp.sqrt(sum(x * x for x in w))
                v = w / nrm
                th = sum((M * v)[i] * v[i] for i in range(zeta.d))
                if abs(th - prev) < mp.mpf(10) ** (-(dps + 5)) * max(1, abs(th)):
                    break
                prev = th
            total = sum(v)
            v = [x / total for x in v]
            heights_mp = tuple(mp.mpf(x) for x in v)
        return cls(
            heights=np.array([float(x) for x in heights_mp]),
            heights_mp=heights_mp,
            mode="self-similar",
        )


def first_letter_power(zeta: Substitution, a: int, max_power: int = 24) -> int | None:
    """Smallest p with zeta^p(a) starting with a, or None."""
    fl = [w[0] for w in zeta.rules]
    b = a
    for p in range(1, max_power + 1):
        b = fl[b]
        if b == a:
            return p
    return None


def fixed_point_prefix(zeta: Substitution, a: int, N: int) -> np.ndarray:
    """Length-N prefix of the one-sided fixed point starting from letter a.

    A power of zeta with zeta^p(a) starting with a is detected automatically.
    """
    if N < 1:
        raise PreconditionError("prefix length must be >= 1")
    if N > WORD_CAP:
        raise PreconditionError(f"prefix length {N} exceeds word cap {WORD_CAP}")
    p = first_letter_power(zeta, a)
    if p is None:
        raise PreconditionError(
            f"no power up to 24 maps {zeta.tokens[a]!r} to a word starting with itself"
        )
    zp = zeta.power(p)
    w = np.array([a], dtype=np.uint8)
    while len(w) < N:
        w2 = zp.apply(w)[:N]
        if len(w2) == len(w):
            raise PreconditionError(
                f"fixed point of {zeta.tokens[a]!r} is finite (length {len(w)}); "
                f"cannot produce a prefix of length {N}"
            )
        w = w2
    return w[:N]


def seed_letter(zeta: Substitution) -> int:
    """First letter admitting a one-sided fixed point."""
    for a in range(zeta.d):
        if first_letter_power(zeta, a) is not None:
            return a
    raise PreconditionError("no letter admits a one-sided fixed point")


@dataclass(frozen=True)
class AperiodicityVerdict:
    status: str  # "Periodic" | "Aperiodic" | "Unknown"
    reason: str
    tests_run: tuple[str, ...]


def constant_length(zeta: Substitution) -> int | None:
    lens = {len(w) for w in zeta.rules}
    return lens.pop() if len(lens) == 1 else None


def _smallest_period(u: np.ndarray) -> int | None:
    n = len(u)
    for p in range(1, n // 4 + 1):
        if (u[: n - p] == u[p:]).all():
            return p
    return None


def aperiodicity_verdict(zeta: Substitution) -> AperiodicityVerdict:
    """Tri-state aperiodicity test.

    Constant length: Pansiot neighborhood criterion on a fixed-point prefix
    (re-scanned once at doubled length), with an explicit period check in the
    single-neighborhood case.  Non-constant length: aperiodic when the PF
    eigenvalue is irrational; Unknown otherwise.
    """
    ok, _ = is_primitive(zeta)
    if not ok:
        raise PreconditionError("aperiodicity test requires a primitive substitution")
    q = constant_length(zeta)
    d = zeta.d
    if q is not None:
        base = 16 * q * d * d
        tests = []
        for L in (base, 2 * base):
            try:
                u = fixed_point_prefix(zeta, seed_letter(zeta), L + 2)
            except PreconditionError:
                return AperiodicityVerdict(
                    "Periodic", "fixed point is a finite word", ("pansiot-scan",)
                )
            tests.append(f"pansiot-scan:{L}")
            nbhd: dict[int, set] = {}
            for i in range(1, len(u) - 1):
                nbhd.setdefault(int(u[i]), set()).add((int(u[i - 1]), int(u[i + 1])))
            if any(len(s) >= 2 for s in nbhd.values()):
                letter = next(a for a, s in nbhd.items() if len(s) >= 2)
                return AperiodicityVerdict(
                    "Aperiodic",
                    f"letter {zeta.tokens[letter]!r} occurs with >= 2 distinct neighborhoods",
                    tuple(tests),
                )
        p = _smallest_period(u)
        if p is not None:
            return AperiodicityVerdict(
                "Periodic", f"fixed-point prefix has period {p}", tuple(tests + ["period-check"])
            )
        return AperiodicityVerdict(
            "Unknown", "single neighborhoods but no short period found", tuple(tests)
        )
    # non-constant length: check irrationality of theta exactly
    from ._algebra import char_poly, dominant_factor

    poly = char_poly(substitution_matrix(zeta))
    theta = perron_data(zeta).theta
    fac = dominant_factor(poly, theta)
    if fac.degree() >= 2:
        return AperiodicityVerdict(
            "Aperiodic",
            "PF eigenvalue is irrational (minimal polynomial degree "
            f"{fac.degree()})",
            ("theta-irrationality",),
        )
    return AperiodicityVerdict(
        "Unknown",
        "PF eigenvalue is rational; no general criterion applies",
        ("theta-irrationality",),
    )


def _contains(haystack: np.ndarray, needle) -> bool:
    return bytes(haystack).find(bytes(_as_word(needle))) >= 0


def return_words(
    zeta: Substitution, max_len: int, scan_len: int = 40_000
) -> set[tuple[int, ...]]:
    """Return words found in a fixed-point prefix.

    v is a return word when vc occurs in the fixed point, c is the first
    letter of v, and v separates two successive occurrences of c.
    """
    if max_len <= 0:
        return set()
    u = fixed_point_prefix(zeta, seed_letter(zeta), min(scan_len, WORD_CAP))
    found: set[tuple[int, ...]] = set()
    for c in range(zeta.d):
        pos = np.flatnonzero(u == c)
        for p1, p2 in zip(pos[:-1], pos[1:]):
            if p2 - p1 <= max_len:
                found.add(tuple(int(x) for x in u[p1:p2]))
    return found


def good_return_words(
    zeta: Substitution, max_len: int, max_power: int = 8, scan_len: int = 40_000
) -> tuple[int, set[tuple[int, ...]]]:
    """(power k, words v) such that vc occurs in every zeta^k(b).

    The smallest power k <= max_power admitting at least one good return word
    is chosen; an empty set is returned (with k = max_power) if none exists.
    """
    candidates = return_words(zeta, max_len, scan_len=scan_len)
    for k in range(1, max_power + 1):
        zk = zeta.power(k)
        good = set()
        for v in candidates:
            vc = v + (v[0],)
            if all(_contains(np.asarray(w, dtype=np.uint8), vc) for w in zk.rules):
                good.add(v)
        if good:
            return k, good
    return max_power, set()
