"""Statistical audit of the query privacy of the protocol.

The exact statement (queries independent of the other nodes' demands
given an observer's own demand and storage) cannot be checked on finite
samples, so the audit tests its observable consequences: every node's
query is uniform over all permutations, and the query distribution of a
non-observer block does not move when that block's demand changes.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Sequence

import numpy as np
from scipy import stats

from .pda import ExtendedPdaMeta, Pda
from .sim import SimConfig, draw_impersonation, exchange_queries, generate_query, map_phase, shuffle_phase


class AuditError(ValueError):
    pass


class TooFewTrials(AuditError):
    pass


class DegenerateScenarios(AuditError):
    pass


@dataclass(frozen=True)
class AuditConfig:
    k: int                      # real nodes K1
    q: int                      # functions K2
    trials: int
    demands: tuple[int, ...] | None = None
    observer: int = 1
    scenarios: tuple[tuple[int, ...], ...] = ()
    significance: float = 0.01
    tv_threshold: float = 0.05
    mi_threshold: float = 0.01
    seed: int = 0
    inject_a: tuple[int, ...] | None = None
    inject_y: tuple[tuple[int, ...], ...] | None = None
    pda: Pda | None = None
    meta: ExtendedPdaMeta | None = None

    def __post_init__(self):
        if self.demands is None:
            object.__setattr__(self, "demands", tuple((i % self.q) + 1 for i in range(self.k)))
        object.__setattr__(self, "scenarios", tuple(tuple(s) for s in self.scenarios))
        if not 2 <= self.q <= 6:
            raise AuditError("audits enumerate all K2! permutations; need 2 <= K2 <= 6")
        if self.trials < 100 * math.factorial(self.q):
            raise TooFewTrials(f"need at least {100 * math.factorial(self.q)} trials, got {self.trials}")
        if len(self.demands) != self.k or not all(1 <= d <= self.q for d in self.demands):
            raise AuditError(f"need {self.k} demands in [1, {self.q}]")
        if not 1 <= self.observer <= self.k:
            raise AuditError("observer must be a real node")


@dataclass
class AuditReport:
    kind: str
    trials: int
    significance: float
    chi2: dict[int, float] = field(default_factory=dict)
    p_values: dict[int, float] = field(default_factory=dict)
    histograms: dict[int, dict[tuple[int, ...], int]] = field(default_factory=dict)
    max_tv: float | None = None
    tv: dict[int, float] = field(default_factory=dict)
    mi_bits: float | None = None
    observer: int | None = None
    observer_storage: tuple[int, ...] | None = None
    skipped: bool = False
    passed: bool = True


def _rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed % 2**64, *path]))


def _sample_queries(k2: int, d: int, trials: int, rng, a: int | None = None) -> list[tuple[int, ...]]:
    """``trials`` protocol query draws of one node: fresh a (unless fixed) then y."""
    out = []
    for _ in range(trials):
        a_t = draw_impersonation(k2, rng) if a is None else a
        out.append(generate_query(k2, d, a_t, rng))
    return out


def _observer_draw(cfg: AuditConfig) -> tuple[int, tuple[int, ...] | None]:
    k0 = cfg.observer
    if cfg.inject_a is not None:
        a0 = cfg.inject_a[k0 - 1]
    else:
        a0 = draw_impersonation(cfg.q, _rng(cfg.seed, 0, k0))
    storage = None
    if cfg.pda is not None and cfg.meta is not None:
        beta = (k0 - 1) * cfg.q + a0
        storage = tuple(f + 1 for f in cfg.pda.star_rows(beta - 1))
    return a0, storage


def total_variation(p: Counter, q: Counter) -> float:
    n_p, n_q = sum(p.values()), sum(q.values())
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p[x] / n_p - q[x] / n_q) for x in keys)


def plugin_mutual_information(samples: Sequence[Counter]) -> float:
    """Plug-in I(Y; S) in bits, S the sample-set label, Y the outcome."""
    n = sum(sum(c.values()) for c in samples)
    joint = {(i, y): m for i, c in enumerate(samples) for y, m in c.items()}
    p_s = [sum(c.values()) / n for c in samples]
    p_y = Counter()
    for c in samples:
        p_y.update(c)
    mi = 0.0
    for (i, y), m in joint.items():
        pxy = m / n
        mi += pxy * math.log2(pxy / (p_s[i] * p_y[y] / n))
    return max(mi, 0.0)


def audit_query_uniformity(cfg: AuditConfig) -> AuditReport:
    rep = AuditReport("uniformity", cfg.trials, cfg.significance)
    if cfg.inject_y is not None:
        rep.skipped = True
        rep.histograms = {j: {tuple(y): cfg.trials} for j, y in enumerate(cfg.inject_y, start=1)}
        return rep
    perms = list(permutations(range(1, cfg.q + 1)))
    expected = np.full(len(perms), cfg.trials / len(perms))
    for j in range(1, cfg.k + 1):
        a = cfg.inject_a[j - 1] if cfg.inject_a is not None else None
        hist = Counter(_sample_queries(cfg.q, cfg.demands[j - 1], cfg.trials, _rng(cfg.seed, 1, j), a))
        observed = np.array([hist[p] for p in perms])
        chi2, p = stats.chisquare(observed, expected)
        rep.chi2[j], rep.p_values[j] = float(chi2), float(p)
        rep.histograms[j] = {p_: hist[p_] for p_ in perms}
    rep.passed = all(p > cfg.significance for p in rep.p_values.values())
    return rep


def audit_demand_independence(cfg: AuditConfig) -> AuditReport:
    """Compare non-observer query distributions across demand scenarios.

    Blocks draw their queries independently, so the conditional mutual
    information splits into a sum of per-block terms; the estimate
    reported is that sum, each term a plug-in estimate against the
    scenario label.
    """
    scen = cfg.scenarios
    if len(scen) < 2:
        raise DegenerateScenarios("need at least two demand scenarios")
    k0 = cfg.observer
    for s in scen:
        if len(s) != cfg.k or not all(1 <= d <= cfg.q for d in s):
            raise AuditError(f"scenario {s} is not a demand vector")
    if len({s[k0 - 1] for s in scen}) != 1:
        raise DegenerateScenarios("scenarios must agree on the observer's own demand")
    rep = AuditReport("independence", cfg.trials, cfg.significance, observer=k0)
    _, rep.observer_storage = _observer_draw(cfg)
    mi = 0.0
    for j in range(1, cfg.k + 1):
        if j == k0:
            continue
        hists = [
            Counter(_sample_queries(cfg.q, s[j - 1], cfg.trials, _rng(cfg.seed, 2, i, j)))
            for i, s in enumerate(scen)
        ]
        rep.tv[j] = max(total_variation(a, b) for a, b in _pairs(hists))
        mi += plugin_mutual_information(hists)
    rep.max_tv = max(rep.tv.values(), default=0.0)
    rep.mi_bits = mi
    rep.passed = rep.max_tv < cfg.tv_threshold and rep.mi_bits < cfg.mi_threshold
    return rep


def _pairs(xs):
    return [(xs[i], xs[j]) for i in range(len(xs)) for j in range(i + 1, len(xs))]


def transcript_shape(states_symbols) -> list[tuple[int, int, int]]:
    return sorted((x.sender, x.t, x.bits) for x in states_symbols)


def check_transcript_shapes(pda: Pda, meta: ExtendedPdaMeta, seed: int = 0) -> tuple[bool, int]:
    """Run the shuffle under every demand vector; shapes must not depend on it.

    Returns (all shapes identical, number of demand vectors tried).
    """
    shapes = set()
    count = 0
    for d in product(range(1, meta.k2 + 1), repeat=meta.k1):
        cfg = SimConfig(pda, meta, d, master_seed=seed)
        states = map_phase(cfg)
        exchange_queries(states, cfg)
        shapes.add(tuple(transcript_shape(shuffle_phase(states, cfg))))
        count += 1
    return len(shapes) == 1, count
