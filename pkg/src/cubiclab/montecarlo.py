"""Seeded sampling of the random short Euler product L(1,X;y) and empirical
tail estimation with standard errors.

Uniforms are counter-based, keyed by (seed, draw index, prime index), so the
sample stream is independent of evaluation order and chunking.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from cubiclab import PrecondError
from cubiclab._kernels import mc_logabs3, mc_uniforms
from cubiclab.primes import PrimeRange, primes_in
from cubiclab.randmodel import EULER_GAMMA, ZETA3, RandomCharModel
from cubiclab.tables import TailRow, TailTable

MIN_HITS = 25
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    y: int
    n_samples: int
    ell: int = 3

    def __post_init__(self):
        if self.y < 2 or self.y > 10**7:
            raise PrecondError("need 2 <= y <= 1e7")
        if not (1 <= self.n_samples <= 10**8):
            raise PrecondError("need 1 <= n_samples <= 1e8")
        if self.ell < 3 or self.ell % 2 == 0:
            raise PrecondError("ell must be an odd prime")


@dataclass(frozen=True)
class SampleBatch:
    log_abs: np.ndarray  # log|L(1,X;y)| per draw
    config: SamplerConfig


def _law_arrays3(y: int):
    """Per-prime thresholds and log-contributions for the order-3 law."""
    ps = primes_in(PrimeRange(2, y))
    pf = ps.astype(np.float64)
    one = ps % 3 == 1
    delta = np.zeros_like(pf)
    delta[one] = 2.0 / (pf[one] + 2.0)
    alpha = 1.0 - delta
    t0 = delta
    t1 = delta + alpha / 3.0
    c1 = -np.log1p(-1.0 / pf)  # -log|1 - 1/p|
    cw = -0.5 * np.log1p(1.0 / pf + 1.0 / pf**2)  # -log|1 - omega/p|
    return ps, t0, t1, c1, cw


def _law_arrays_general(y: int, ell: int):
    ps = primes_in(PrimeRange(2, y))
    pf = ps.astype(np.float64)
    model = RandomCharModel(ell)
    delta = np.array([float(model.delta(int(p))) for p in ps])
    alpha = 1.0 - delta
    # cumulative thresholds: [delta, delta + a/l, ..., delta + l*a/l]
    cum = delta[None, :] + np.arange(1, ell + 1)[:, None] * (alpha / ell)[None, :]
    ks = np.arange(ell)
    contrib = -0.5 * np.log1p(
        (-2.0 * np.cos(2.0 * math.pi * ks[:, None] / ell)) / pf[None, :]
        + 1.0 / pf[None, :] ** 2
    )
    return ps, delta, cum, contrib


def sample(config: SamplerConfig, threads: int = 1, chunk: int = _CHUNK) -> SampleBatch:
    """Draw log|L(1,X;y)| for n_samples independent realizations."""
    n = config.n_samples
    out = np.empty(n, dtype=np.float64)
    if config.ell == 3:
        _, t0, t1, c1, cw = _law_arrays3(config.y)

        def work(i0):
            i1 = min(i0 + chunk, n)
            mc_logabs3(config.seed, i0, i1, t0, t1, c1, cw, out[i0:i1])

    else:
        _, delta, cum, contrib = _law_arrays_general(config.y, config.ell)

        def work(i0):
            i1 = min(i0 + chunk, n)
            acc = np.zeros(i1 - i0)
            u = np.empty(i1 - i0)
            for j in range(cum.shape[1]):
                mc_uniforms(config.seed, i0, i1, j, u)
                live = u >= delta[j]
                k = np.searchsorted(cum[:, j], u, side="right")
                np.clip(k, 0, config.ell - 1, out=k)
                acc += np.where(live, contrib[k, j], 0.0)
            out[i0:i1] = acc

    starts = list(range(0, n, chunk))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, starts))
    else:
        for i0 in starts:
            work(i0)
    return SampleBatch(log_abs=out, config=config)


def sample_atoms(config: SamplerConfig, p: int) -> dict:
    """Atom counts of X(p) over the batch's draws, keyed like x_law
    (-1 for zero, k for omega^k); uses the same uniform stream as sample()."""
    ps = primes_in(PrimeRange(2, config.y))
    idx = np.searchsorted(ps, p)
    if idx >= len(ps) or ps[idx] != p:
        raise PrecondError(f"{p} is not a prime <= y")
    model = RandomCharModel(config.ell)
    delta = float(model.delta(p))
    alpha = 1.0 - delta
    counts = {-1: 0} | {k: 0 for k in range(config.ell)}
    u = np.empty(min(config.n_samples, 1 << 22))
    done = 0
    while done < config.n_samples:
        m = min(len(u), config.n_samples - done)
        mc_uniforms(config.seed, done, done + m, int(idx), u[:m])
        uu = u[:m]
        counts[-1] += int(np.sum(uu < delta))
        for k in range(config.ell):
            lo = delta + k * alpha / config.ell
            hi = delta + (k + 1) * alpha / config.ell
            counts[k] += int(np.sum((uu >= lo) & (uu < hi)))
        done += m
    return counts


def wilson_interval(hits: int, n: int, z: float = 1.0) -> tuple:
    """(center, halfwidth) of the Wilson score interval."""
    if n <= 0:
        raise PrecondError("n must be positive")
    phat = hits / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom
    return center, half


def save_tails(table: TailTable, config: SamplerConfig, path):
    """CSV dump in the module's wire format: tau,side,estimate,stderr,n,seed,y."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "side", "estimate", "stderr", "n", "seed", "y"])
        for r in table.rows:
            w.writerow([f"{r.tau:.12g}", r.side, f"{r.value:.12g}",
                        f"{r.stderr:.12g}", r.n, config.seed, config.y])


def empirical_tails(batch: SampleBatch, taus, side: str) -> TailTable:
    """Monte-Carlo estimates of Phi/Psi at each tau with Wilson standard
    errors; rows with fewer than 25 hits are flagged ok=False."""
    if side not in ("large", "small"):
        raise PrecondError("side must be 'large' or 'small'")
    la = batch.log_abs
    n = len(la)
    if n == 0:
        raise PrecondError("empty batch")
    table = TailTable()
    for tau in taus:
        tau = float(tau)
        if side == "large":
            hits = int(np.sum(la > EULER_GAMMA + math.log(tau))) if tau > 0 else n
        else:
            if tau <= 0:
                raise PrecondError("small side needs tau > 0")
            thr = 0.5 * (math.log(ZETA3) - EULER_GAMMA) - math.log(tau)
            hits = int(np.sum(la < thr))
        _, se = wilson_interval(hits, n)
        table.append(TailRow(tau=tau, side=side, value=hits / n, method="montecarlo",
                             count=hits, n=n, stderr=se, ok=hits >= MIN_HITS))
    return table
