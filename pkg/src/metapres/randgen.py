"""Few-relators model: random relators of fixed length and full-rank frequency.

Trial ``i`` at length ``ell`` draws its letters from a Philox stream keyed by
``(master_seed, ell)`` starting at counter ``i * B`` (``B`` counter blocks per
trial).  Any chunking of the trial range therefore reproduces the same
letters, and results do not depend on how many threads did the work.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .intlinalg import rank
from .presentation import Presentation
from .words import GroupWord, free_reduce

CSV_COLUMNS = ("n", "m", "ell", "trials", "successes", "p_hat", "ci_low", "ci_high", "seed")


def default_names(n: int) -> tuple[str, ...]:
    if n <= 26:
        return tuple("abcdefghijklmnopqrstuvwxyz"[:n])
    return tuple(f"a{j + 1}" for j in range(n))


def _codes_to_letters(codes, n: int) -> list[int]:
    # code k < n is a_k, code k >= n is a_{k-n}^-1
    return [int(k) + 1 if k < n else n - int(k) - 1 for k in codes]


def sample_word(n: int, ell: int, rng: np.random.Generator) -> GroupWord:
    """Uniform over the ``(2n)^ell`` letter sequences, then freely reduced."""
    if ell < 0:
        raise ValueError("length must be non-negative")
    codes = rng.integers(0, 2 * n, size=ell)
    return free_reduce(_codes_to_letters(codes, n), n)


def sample_presentation(n: int, m: int, ell: int, rng: np.random.Generator, names=None) -> Presentation:
    names = default_names(n) if names is None else tuple(names)
    return Presentation(names, tuple(sample_word(n, ell, rng) for _ in range(m)))


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    m: int
    lengths: tuple[int, ...]
    trials: int
    master_seed: int = 0
    confidence: float = 0.99
    chunk_size: int = 4096

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(int(x) for x in self.lengths))
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be at least 1")
        if not self.lengths or min(self.lengths) < 1:
            raise ValueError("every length must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class LengthResult:
    n: int
    m: int
    ell: int
    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    rows: tuple[LengthResult, ...] = field(default_factory=tuple)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.n, r.m, r.ell, r.trials, r.successes, repr(r.p_hat), repr(r.ci_low), repr(r.ci_high), r.seed])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"config": asdict(self.config), "rows": [asdict(r) for r in self.rows]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2) / (1 + z2n)
    half = z / (1 + z2n) * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials))
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return min(low, p), max(high, p)


def _stream_key(master_seed: int, ell: int) -> np.ndarray:
    return np.random.SeedSequence([master_seed, ell]).generate_state(2, np.uint64)


def _blocks_per_trial(m: int, ell: int) -> int:
    return -(-m * ell // 4)


def trial_codes(n: int, m: int, ell: int, master_seed: int, start: int, stop: int) -> np.ndarray:
    """Letter codes for trials ``start .. stop-1``, shape ``(stop-start, m, ell)``.

    Codes are ``raw % 2n`` of 64-bit outputs; the bias is below ``2n / 2^64``.
    """
    B = _blocks_per_trial(m, ell)
    count = stop - start
    if count <= 0:
        return np.zeros((0, m, ell), dtype=np.int64)
    bitgen = np.random.Philox(key=_stream_key(master_seed, ell), counter=start * B)
    raw = bitgen.random_raw(4 * B * count).reshape(count, 4 * B)[:, : m * ell]
    return (raw % np.uint64(2 * n)).astype(np.int64).reshape(count, m, ell)


def trial_presentation(n: int, m: int, ell: int, master_seed: int, i: int) -> Presentation:
    """The presentation drawn by trial ``i`` of an experiment."""
    codes = trial_codes(n, m, ell, master_seed, i, i + 1)[0]
    rels = tuple(free_reduce(_codes_to_letters(row, n), n) for row in codes)
    return Presentation(default_names(n), rels)


def exponent_batch(codes: np.ndarray, n: int) -> np.ndarray:
    """Exponent vectors ``(T, m, n)`` from letter codes ``(T, m, ell)``."""
    gen = codes % n
    sign = np.where(codes < n, 1, -1)
    out = np.zeros(codes.shape[:2] + (n,), dtype=np.int64)
    for j in range(n):
        out[..., j] = np.where(gen == j, sign, 0).sum(axis=-1)
    return out


def _batched_det(A: np.ndarray) -> np.ndarray:
    k = A.shape[-1]
    total = np.zeros(A.shape[:-2], dtype=np.int64)
    for perm in itertools.permutations(range(k)):
        inv = sum(1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b])
        term = np.ones(A.shape[:-2], dtype=np.int64)
        for i, p in enumerate(perm):
            term = term * A[..., i, p]
        total = total - term if inv & 1 else total + term
    return total


def full_rank_batch(E: np.ndarray) -> np.ndarray:
    """Exact full-rank flags for a stack of small integer matrices ``(T, m, n)``.

    Full rank means some ``r x r`` minor is nonzero, ``r = min(m, n)``.
    """
    T, m, n = E.shape
    r = min(m, n)
    bound = int(np.abs(E).max(initial=0))
    if r > 4 or (bound and r * math.log2(bound) + math.log2(math.factorial(r)) > 62):
        return np.array([rank(M.tolist()) == r for M in E], dtype=bool)
    ok = np.zeros(T, dtype=bool)
    for rows in itertools.combinations(range(m), r):
        for cols in itertools.combinations(range(n), r):
            sub = E[:, rows, :][:, :, cols]
            ok |= _batched_det(sub) != 0
    return ok


def _count_successes(n, m, ell, seed, start, stop) -> int:
    return int(full_rank_batch(exponent_batch(trial_codes(n, m, ell, seed, start, stop), n)).sum())


def estimate_full_rank_probability(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Monte Carlo frequency of full-rank relation matrices, one row per length."""
    rows = []
    for ell in cfg.lengths:
        bounds = [(s, min(s + cfg.chunk_size, cfg.trials)) for s in range(0, cfg.trials, cfg.chunk_size)]
        args = [(cfg.n, cfg.m, ell, cfg.master_seed, a, b) for a, b in bounds]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                counts = list(pool.map(lambda a: _count_successes(*a), args))
        else:
            counts = [_count_successes(*a) for a in args]
        k = sum(counts)
        lo, hi = wilson_interval(k, cfg.trials, cfg.confidence)
        rows.append(LengthResult(cfg.n, cfg.m, ell, cfg.trials, k, k / cfg.trials, lo, hi, cfg.master_seed))
    return ExperimentResult(cfg, tuple(rows))


# ---------------------------------------------------------------------------
# exact oracle


def exponent_distribution(n: int, ell: int) -> dict[tuple[int, ...], int]:
    """Number of length-``ell`` letter sequences with each exponent vector.

    Dynamic programming over the cube ``[-ell, ell]^n``: each step adds
    ``+-e_j`` for every ``j``.
    """
    size = 2 * ell + 1
    big = (2 * n) ** ell > 2**62
    grid = np.zeros((size,) * n, dtype=object if big else np.int64)
    grid[(ell,) * n] = 1
    for _ in range(ell):
        nxt = np.zeros_like(grid)
        for axis in range(n):
            up = [slice(None)] * n
            dn = [slice(None)] * n
            up[axis], dn[axis] = slice(1, None), slice(None, -1)
            nxt[tuple(up)] += grid[tuple(dn)]
            nxt[tuple(dn)] += grid[tuple(up)]
        grid = nxt
    return {tuple(int(i) - ell for i in idx): int(grid[idx]) for idx in zip(*np.nonzero(grid))}


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    v = [x // g for x in v]
    first = next(x for x in v if x)
    return tuple(-x for x in v) if first < 0 else tuple(v)


def _line_masses(dist) -> tuple[int, dict[tuple[int, ...], int]]:
    n = len(next(iter(dist)))
    zero = dist.get((0,) * n, 0)
    lines: dict[tuple[int, ...], int] = {}
    for v, c in dist.items():
        if any(v):
            key = _primitive(v)
            lines[key] = lines.get(key, 0) + c
    return zero, lines


def _plane_strata(lines: dict, zero: int, m: int) -> int:
    """Sum over planes ``P`` spanned by support of ``P(span of m draws = P)``, in counts."""
    dirs = list(lines)
    if len(dirs) < 2:
        return 0
    U = np.array(dirs, dtype=np.int64)
    masses = [lines[d] for d in dirs]
    f = [(zero + c) ** m - zero**m for c in masses]
    n = U.shape[1]
    iu, ju = np.triu_indices(len(dirs), k=1)
    pairs = list(itertools.combinations(range(n), 2))
    # Plucker coordinates of u_i ^ u_j identify the plane they span.
    pl = np.stack([U[iu, a] * U[ju, b] - U[iu, b] * U[ju, a] for a, b in pairs], axis=1)
    g = np.gcd.reduce(np.abs(pl), axis=1)
    keep = g > 0
    pl, iu, ju, g = pl[keep], iu[keep], ju[keep], g[keep]
    pl = pl // g[:, None]
    first = pl[np.arange(len(pl)), (pl != 0).argmax(axis=1)]
    pl = pl * np.sign(first)[:, None]
    _, plane = np.unique(pl, axis=0, return_inverse=True)
    plane = plane.reshape(-1)
    members = np.unique(
        np.concatenate([np.stack([plane, iu], axis=1), np.stack([plane, ju], axis=1)]), axis=0
    )
    q: dict[int, int] = {}
    fsum: dict[int, int] = {}
    for pid, d in members.tolist():
        q[pid] = q.get(pid, zero) + masses[d]
        fsum[pid] = fsum.get(pid, 0) + f[d]
    z = zero**m
    return sum(q[pid] ** m - z - fsum[pid] for pid in q)


def _brute_force_count(dist, n: int, m: int) -> int:
    support = list(dist.items())
    r = min(n, m)
    good = 0
    for combo in itertools.product(support, repeat=m):
        if rank([v for v, _ in combo]) == r:
            w = 1
            for _, c in combo:
                w *= c
            good += w
    return good


def exact_full_rank_probability(
    n: int, m: int, ell: int, max_n: int = 3, max_m: int = 3, max_ell: int = 10
) -> Fraction:
    """Exact probability that ``m`` uniform length-``ell`` words give a full-rank matrix.

    Rank-deficient tuples are counted by the subspace their rows span:
    the zero space, a line, or (for rank 3) a plane, each counted by
    inclusion-exclusion over the strata below it.
    """
    if n > max_n or m > max_m or ell > max_ell:
        raise ValueError(f"(n, m, ell) = ({n}, {m}, {ell}) exceeds guards ({max_n}, {max_m}, {max_ell})")
    if n < 1 or m < 0 or ell < 0:
        raise ValueError("need n >= 1, m >= 0, ell >= 0")
    if m == 0:
        return Fraction(1)
    dist = exponent_distribution(n, ell)
    total = (2 * n) ** (ell * m)
    r = min(n, m)
    zero, lines = _line_masses(dist)
    bad = zero**m
    if r >= 2:
        bad += sum((zero + c) ** m - zero**m for c in lines.values())
    if r >= 3:
        bad += _plane_strata(lines, zero, m)
    if r >= 4:
        return Fraction(_brute_force_count(dist, n, m), total)
    return Fraction(total - bad, total)
