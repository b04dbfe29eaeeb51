"""Finite-blocklength oracle for the random-coding ensemble.

Samples the exact achievability ensemble (constant-composition codebooks
partitioned into contiguous sub-codes, eavesdropper running the optimal
sub-code likelihood decoder) and estimates the ensemble-average probability
of correct decoding, either by exact enumeration of the output space or by
forward sampling when that space exceeds the budget.

Also provides the finite-n exponent obtained by exhaustive enumeration of
conditional types, which converges to the asymptotic exponent and serves as
an independent brute-force check of it.

Per-trial randomness comes from seed-derived child streams, so trials are
reproducible independently of execution order or worker count, and runs at
different total rates share codeword randomness (a codebook is always a
prefix of the codebook drawn for a larger rate at the same seed and trial).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr, xlogy

from .channels import ChannelSpec, Dmc
from .errors import BudgetExceededError
from .exponent import RatePair

DEFAULT_Z_BUDGET = 1 << 24
DEFAULT_TYPE_BUDGET = 1 << 24
DEFAULT_CODEBOOK_BUDGET = 1 << 22
DEFAULT_Z_SAMPLES = 256


def quantize_composition(probs, n: int) -> tuple[int, ...]:
    """Nearest integer composition of n to n*probs, by largest remainder."""
    p = np.asarray(probs, dtype=float)
    scaled = p * n
    base = np.floor(scaled).astype(int)
    short = n - int(base.sum())
    if short > 0:
        order = np.argsort(-(scaled - base), kind="stable")
        base[order[:short]] += 1
    return tuple(int(c) for c in base)


@dataclass(frozen=True)
class EnsembleSpec:
    """Description of one finite-n random-coding experiment.

    Codebook sizes derive from the rates: M2 = round(e^{n R2}) codewords per
    sub-code, M = round(e^{n(R1-R2)}) sub-codes, M1 = M*M2 codewords total.
    Realized rates ln(M2)/n and ln(M1)/n are reported alongside, since
    integer codebooks quantize the requested rates.
    """

    n: int
    rates: RatePair
    p_x_type: tuple[int, ...]
    channel: Dmc
    trials: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("blocklength must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if any(c < 0 for c in self.p_x_type):
            raise ValueError("composition entries must be nonnegative")
        if sum(self.p_x_type) != self.n:
            raise ValueError(
                f"composition {self.p_x_type} does not sum to n = {self.n}")
        if len(self.p_x_type) != self.channel.num_inputs:
            raise ValueError(
                f"composition has {len(self.p_x_type)} symbols but the "
                f"channel has {self.channel.num_inputs} inputs")

    @property
    def m2(self) -> int:
        return max(1, int(round(math.exp(min(self.n * self.rates.r2, 60.0)))))

    @property
    def m_subcodes(self) -> int:
        return max(1, int(round(math.exp(min(self.n * self.rates.r, 60.0)))))

    @property
    def m1(self) -> int:
        return self.m2 * self.m_subcodes

    @property
    def realized_r1(self) -> float:
        return math.log(self.m1) / self.n

    @property
    def realized_r2(self) -> float:
        return math.log(self.m2) / self.n


@dataclass(frozen=True)
class SimulationResult:
    """Ensemble estimate of the probability of correct decoding."""

    pc_mean: float
    pc_std_err: float
    empirical_exponent: float
    trials_used: int


@dataclass(frozen=True)
class TypeEnumExponent:
    """Finite-n exponent from exhaustive conditional-type enumeration."""

    n: int
    value: float


# ---------------------------------------------------------------------------
# codebook sampling and decoding
# ---------------------------------------------------------------------------

def sample_codebook(spec: EnsembleSpec, rng: np.random.Generator,
                    codebook_budget: int = DEFAULT_CODEBOOK_BUDGET) -> np.ndarray:
    """Draw M1 codewords i.i.d. uniform over the type class of the composition.

    Returns an (M1, n) integer array; sub-code w occupies the contiguous row
    block [w*M2, (w+1)*M2).  Codeword k is produced from the k-th row of the
    generator's stream, so a smaller codebook drawn from an identically
    seeded generator is a prefix of a larger one.
    """
    m1 = spec.m1
    if m1 > codebook_budget:
        raise BudgetExceededError("M1 codewords", m1, codebook_budget)
    template = np.repeat(np.arange(len(spec.p_x_type), dtype=np.int8),
                         spec.p_x_type)
    order = np.argsort(rng.random((m1, spec.n)), axis=1, kind="stable")
    return template[order]


def _log_rows(channel: Dmc) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(channel.rows > 0, np.log(channel.rows), -np.inf)


def decoder_log_score(codebook: np.ndarray, m2: int, w: int, z,
                      channel: Dmc) -> float:
    """ln P(z | C_w), the log-likelihood of sub-code w, via log-sum-exp."""
    z = np.asarray(z, dtype=np.int64)
    sub = codebook[w * m2:(w + 1) * m2]
    logp = _log_rows(channel)
    ll = logp[sub, z[None, :]].sum(axis=1)
    hi = float(ll.max())
    if not math.isfinite(hi):
        return -math.inf
    return hi + math.log(float(np.exp(ll - hi).sum())) - math.log(m2)


def decoder_score(codebook: np.ndarray, m2: int, w: int, z,
                  channel: Dmc) -> float:
    """P(z | C_w) = (1/M2) sum over codewords in sub-code w of P(z|x)."""
    return math.exp(decoder_log_score(codebook, m2, w, z, channel))


# ---------------------------------------------------------------------------
# exact probability of correct decoding for one codebook
# ---------------------------------------------------------------------------

def exact_pc_for_codebook(codebook: np.ndarray, channel: Dmc, m2: int,
                          budget: int = DEFAULT_Z_BUDGET) -> float:
    """P_c of the optimal sub-code decoder, by full enumeration of Z^n.

    Computes (1/M) * sum over z of max_w P(z | C_w); ties in the max are
    irrelevant because only the maximal value enters.
    """
    m1, n = codebook.shape
    if m1 % m2 != 0:
        raise ValueError(f"codebook of {m1} codewords does not split into "
                         f"sub-codes of size {m2}")
    nz = channel.num_outputs
    total = nz ** n
    if total > budget:
        raise BudgetExceededError("|Z|^n", total, budget)
    m = m1 // m2
    if (channel.rows.shape == (2, 2) and np.all(channel.rows > 0)
            and codebook.max(initial=0) <= 1 and n <= 63):
        return _exact_pc_binary(codebook, channel.rows, m2, m)
    return _exact_pc_general(codebook, channel.rows, m2, m)


def _exact_pc_binary(codebook: np.ndarray, rows: np.ndarray, m2: int,
                     m: int) -> float:
    # P(z|x) factorizes over the four joint symbol counts; with c1 ones in x
    # and cz ones in z only d11 = |{t: x_t = z_t = 1}| varies per pair, so
    # P(z|x) = amp(x) * t^d11 * exp(cz*delta).  Splitting positions into two
    # halves makes d11 additive across halves, turning each sub-code's
    # likelihood table into a small matrix product over its codewords.
    m1, n = codebook.shape
    l00, l01 = math.log(rows[0, 0]), math.log(rows[0, 1])
    l10, l11 = math.log(rows[1, 0]), math.log(rows[1, 1])
    c1 = codebook.sum(axis=1).astype(np.int64)
    amp = np.exp((n - c1) * l00 + c1 * l10)                     # (m1,)
    t = math.exp(l00 - l01 - l10 + l11)
    delta = l01 - l00
    powt = t ** np.arange(n + 1, dtype=float)

    def half_pows(block: np.ndarray) -> np.ndarray:
        nb = block.shape[1]
        if nb == 0:
            return np.ones((m1, 1))
        bits = np.uint32(1) << np.arange(nb, dtype=np.uint32)
        packed = (block.astype(np.uint32) * bits[None, :]).sum(
            axis=1, dtype=np.uint32)
        zz = np.arange(1 << nb, dtype=np.uint32)
        return powt[np.bitwise_count(packed[:, None] & zz[None, :])]

    n_lo = (n + 1) // 2
    a = half_pows(codebook[:, :n_lo]) * amp[:, None]            # (m1, k_lo)
    b = half_pows(codebook[:, n_lo:])                           # (m1, k_hi)
    k_lo, k_hi = a.shape[1], b.shape[1]
    at = a.reshape(m, m2, k_lo).transpose(0, 2, 1)              # (m, k_lo, m2)
    b3 = b.reshape(m, m2, k_hi)
    w_lo = np.exp(np.bitwise_count(np.arange(k_lo, dtype=np.uint32)) * delta)
    w_hi = np.exp(np.bitwise_count(np.arange(k_hi, dtype=np.uint32)) * delta)

    chunk = max(1, min(k_hi, (1 << 22) // max(1, m * k_lo)))
    acc = 0.0
    for start in range(0, k_hi, chunk):
        sub = np.matmul(at, b3[:, :, start:start + chunk])      # (m, k_lo, c)
        best = sub.max(axis=0)
        acc += float(w_lo @ best @ w_hi[start:start + chunk])
    return acc / (m * m2)


def _exact_pc_general(codebook: np.ndarray, rows: np.ndarray, m2: int,
                      m: int) -> float:
    m1, n = codebook.shape
    nz = rows.shape[1]
    with np.errstate(divide="ignore"):
        logp = np.where(rows > 0, np.log(rows), -np.inf)
    pow_vec = nz ** np.arange(n - 1, -1, -1, dtype=np.int64)
    total = nz ** n
    chunk = max(64, min(total, (1 << 22) // max(1, m1)))
    acc = 0.0
    for start in range(0, total, chunk):
        ar = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (ar[:, None] // pow_vec[None, :]) % nz         # (C, n)
        ll = np.zeros((m1, ar.size))
        for t in range(n):
            ll += logp[codebook[:, t]][:, digits[:, t]]
        ll3 = ll.reshape(m, m2, -1)
        hi = ll3.max(axis=1)                                    # (m, C)
        safe = np.where(np.isfinite(hi), hi, 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            lse = safe + np.log(np.exp(ll3 - safe[:, None, :]).sum(axis=1))
        lse = np.where(np.isfinite(hi), lse, -np.inf)
        best = lse.max(axis=0) - math.log(m2)
        acc += float(np.exp(best).sum())
    return acc / m


def _sampled_pc(codebook: np.ndarray, channel: Dmc, m2: int,
                rng: np.random.Generator, z_samples: int) -> float:
    """Unbiased estimate of one codebook's P_c by forward sampling."""
    m1, n = codebook.shape
    m = m1 // m2
    sent = rng.integers(0, m1, size=z_samples)
    xs = codebook[sent]
    cdf = np.cumsum(channel.rows, axis=1)
    u = rng.random((z_samples, n))
    z = (u[:, :, None] > cdf[xs][:, :, :-1]).sum(axis=2)
    logp = _log_rows(channel)
    ll = np.zeros((m1, z_samples))
    for t in range(n):
        ll += logp[codebook[:, t]][:, z[:, t]]
    ll3 = ll.reshape(m, m2, -1)
    hi = ll3.max(axis=1)
    safe = np.where(np.isfinite(hi), hi, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        lse = safe + np.log(np.exp(ll3 - safe[:, None, :]).sum(axis=1))
    lse = np.where(np.isfinite(hi), lse, -np.inf)
    decoded = np.argmax(lse, axis=0)
    return float(np.mean(decoded == sent // m2))


def estimate_ensemble_pc(spec: EnsembleSpec, budget: int = DEFAULT_Z_BUDGET,
                         z_samples: int = DEFAULT_Z_SAMPLES,
                         codebook_budget: int = DEFAULT_CODEBOOK_BUDGET,
                         trial_range: tuple[int, int] | None = None,
                         ) -> SimulationResult:
    """Monte-Carlo mean of the exact per-codebook P_c over sampled codebooks.

    When |Z|^n fits the budget the inner expectation over channel outputs is
    exact; otherwise each trial forward-samples ``z_samples`` transmissions.
    ``trial_range`` restricts to trials [lo, hi) (used by worker pools); the
    per-trial streams make the union over disjoint ranges identical to a
    single full run.
    """
    pcs = per_trial_pc(spec, budget=budget, z_samples=z_samples,
                       codebook_budget=codebook_budget,
                       trial_range=trial_range)
    return summarize_trials(spec, pcs)


def per_trial_pc(spec: EnsembleSpec, budget: int = DEFAULT_Z_BUDGET,
                 z_samples: int = DEFAULT_Z_SAMPLES,
                 codebook_budget: int = DEFAULT_CODEBOOK_BUDGET,
                 trial_range: tuple[int, int] | None = None) -> list[float]:
    """Per-trial P_c values for the trials in ``trial_range``."""
    lo, hi = trial_range if trial_range is not None else (0, spec.trials)
    if not 0 <= lo <= hi <= spec.trials:
        raise ValueError(f"invalid trial range [{lo}, {hi})")
    exact = spec.channel.num_outputs ** spec.n <= budget
    streams = np.random.SeedSequence(spec.seed).spawn(spec.trials)
    pcs = []
    for k in range(lo, hi):
        rng = np.random.default_rng(streams[k])
        cb = sample_codebook(spec, rng, codebook_budget)
        if exact:
            pcs.append(exact_pc_for_codebook(cb, spec.channel, spec.m2,
                                             budget=budget))
        else:
            pcs.append(_sampled_pc(cb, spec.channel, spec.m2, rng, z_samples))
    return pcs


def summarize_trials(spec: EnsembleSpec, pcs: list[float]) -> SimulationResult:
    """Aggregate per-trial P_c values; the mean uses exact summation."""
    t = len(pcs)
    mean = math.fsum(pcs) / t
    if t > 1:
        var = math.fsum((x - mean) ** 2 for x in pcs) / (t - 1)
        stderr = math.sqrt(var / t)
    else:
        stderr = 0.0
    return SimulationResult(pc_mean=mean, pc_std_err=stderr,
                            empirical_exponent=-math.log(mean) / spec.n,
                            trials_used=t)


# ---------------------------------------------------------------------------
# finite-n type enumeration
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of the given length summing to total."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    out = []
    for head in range(total + 1):
        tail = _compositions(total - head, parts - 1)
        block = np.empty((tail.shape[0], parts), dtype=np.int64)
        block[:, 0] = head
        block[:, 1:] = tail
        out.append(block)
    return np.vstack(out)


def type_enum_exponent(spec: ChannelSpec, rates: RatePair, n: int,
                       budget: int = DEFAULT_TYPE_BUDGET) -> TypeEnumExponent:
    """Finite-n exponent: R1 + min over conditional n-types of D - I - Gamma.

    The input distribution is quantized to its nearest n-type, and the
    minimization runs exhaustively over all conditional types of the output
    sequence given that composition.  Types violating absolute continuity
    have infinite divergence and drop out of the minimum.
    """
    comp = quantize_composition(spec.input_dist.probs, n)
    keep = [k for k, c in enumerate(comp) if c > 0]
    counts = np.array([comp[k] for k in keep], dtype=np.int64)
    w = counts / n
    p_rows = spec.wiretap.rows[keep]
    nz = p_rows.shape[1]
    nr = len(keep)

    sizes = [math.comb(int(c) + nz - 1, nz - 1) for c in counts]
    total = math.prod(sizes)
    if total > budget:
        raise BudgetExceededError("conditional n-types", total, budget)

    row_q, row_d, row_neg = [], [], []
    for x in range(nr):
        kvecs = _compositions(int(counts[x]), nz)
        q = kvecs / counts[x]
        row_q.append(q)
        row_d.append(rel_entr(q, p_rows[x][None, :]).sum(axis=1))
        row_neg.append(xlogy(q, q).sum(axis=1))

    r1, r2 = rates.r1, rates.r2
    best = math.inf
    chunk = 1 << 16
    for start in range(0, total, chunk):
        ar = np.arange(start, min(start + chunk, total), dtype=np.int64)
        rem = ar
        d = np.zeros(ar.size)
        neg = np.zeros(ar.size)
        qz = np.zeros((ar.size, nz))
        for x in range(nr - 1, -1, -1):
            dig = rem % sizes[x]
            rem = rem // sizes[x]
            d = d + w[x] * row_d[x][dig]
            neg = neg + w[x] * row_neg[x][dig]
            qz = qz + w[x] * row_q[x][dig]
        i_val = neg - xlogy(qz, qz).sum(axis=1)
        gamma = np.where(i_val <= r2, r2 - i_val,
                         np.where(i_val <= r1, 0.0, r1 - i_val))
        with np.errstate(invalid="ignore"):
            obj = d - i_val - gamma
        lo = float(np.min(obj))
        if lo < best:
            best = lo
    return TypeEnumExponent(n=n, value=r1 + best)
