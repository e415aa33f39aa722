"""Seeded, bit-exact simulation of the private coded MapReduce protocol.

Labels follow the usual 1-based conventions: real nodes k in [K1],
effective nodes (extended-PDA columns) j in [K1*K2], batches f in [F],
files n in [N] and output functions q in [Q] with Q = K2.

Bit strings are Python ints with an implied length.  A concatenated
symbol U puts the IV of the lowest file index in the most significant
bits, and packet slice 0 is the most significant slice.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

import numpy as np

from .construct import decompose_extended
from .loads import LoadPoint, Source, theorem1_loads
from .pda import ExtendedPdaMeta, Pda, is_star, multiplicity_profile


class SimulationError(Exception):
    pass


class ConfigInvalid(SimulationError):
    pass


class IndivisibleFiles(ConfigInvalid):
    pass


class PacketIndivisible(ConfigInvalid):
    pass


class InternalInconsistency(SimulationError):
    pass


class DecodeFailure(SimulationError):
    pass


# ----------------------------------------------------------------------------
# files, map and reduce functions


def _shake(tag: bytes, *parts: bytes, bits: int) -> int:
    h = hashlib.shake_256(tag)
    for p in parts:
        h.update(len(p).to_bytes(4, "big"))
        h.update(p)
    nbytes = (bits + 7) // 8
    return int.from_bytes(h.digest(nbytes), "big") >> (8 * nbytes - bits)


def _int_bytes(x: int, bits: int) -> bytes:
    return x.to_bytes((bits + 7) // 8, "big")


def file_contents(master_seed: int, n: int, w: int) -> int:
    return _shake(b"pcdc/file", _int_bytes(master_seed % 2**64, 64), _int_bytes(n, 64), bits=w)


def map_function(q: int, content: int, w: int, alpha: int) -> int:
    return _shake(b"pcdc/map", _int_bytes(q, 32), _int_bytes(content, w), bits=alpha)


def reduce_function(q: int, ivs: Sequence[int], alpha: int, b: int) -> int:
    folded = 0
    for v in ivs:
        folded ^= v
    return _shake(b"pcdc/reduce", _int_bytes(q, 32), _int_bytes(folded, alpha), bits=b)


# ----------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Batch:
    index: int
    files: tuple[int, ...]


def partition_files(n_files: int, f_count: int) -> list[Batch]:
    if f_count < 1 or n_files < 1 or n_files % f_count:
        raise IndivisibleFiles(f"{n_files} files cannot be split into {f_count} equal batches")
    eta = n_files // f_count
    return [Batch(f, tuple(range((f - 1) * eta + 1, f * eta + 1))) for f in range(1, f_count + 1)]


@dataclass(frozen=True)
class SimConfig:
    """Everything a run depends on.

    ``n_files`` defaults to F (one file per batch) and ``iv_bits`` to
    8 * lcm of (g_s - 1) over the first source PDA's integers.
    ``inject_a`` / ``inject_y`` replace the random draws for replaying
    fixed transcripts; injecting only y fixes each a_k at the position of
    d_k in y_k.
    """

    pda: Pda
    meta: ExtendedPdaMeta
    demands: tuple[int, ...]
    n_files: int | None = None
    iv_bits: int | None = None
    file_bits: int = 64
    output_bits: int = 64
    master_seed: int = 0
    inject_a: tuple[int, ...] | None = None
    inject_y: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "demands", tuple(self.demands))
        if self.inject_a is not None:
            object.__setattr__(self, "inject_a", tuple(self.inject_a))
        if self.inject_y is not None:
            object.__setattr__(self, "inject_y", tuple(tuple(y) for y in self.inject_y))

    @cached_property
    def layout(self) -> "Layout":
        return Layout(self)

    @property
    def k1(self) -> int:
        return self.meta.k1

    @property
    def k2(self) -> int:
        return self.meta.k2

    @property
    def q(self) -> int:
        return self.meta.k2


class Layout:
    """Derived, validated structure of a config (source PDAs, sizes, positions)."""

    def __init__(self, cfg: SimConfig):
        m = cfg.meta
        try:
            m.check(cfg.pda)
            self.p1, self.p2, _ = decompose_extended(cfg.pda, m.k1, m.k2, m.f1, m.f2)
        except ValueError as exc:
            raise ConfigInvalid(f"not an extended PDA with the given blocks: {exc}") from exc
        if (self.p1.s, self.p2.s) != (m.s1, m.s2):
            raise ConfigInvalid("block metadata integer counts disagree with the grid")
        self.k1, self.k2, self.f2, self.s2 = m.k1, m.k2, m.f2, m.s2
        self.F = cfg.pda.f
        # occurrence columns (0-based) of each first-PDA integer, ascending
        self.occ_cols = {s: sorted(c for _, c in pos) for s, pos in self.p1.positions().items()}
        g_minus_one = [len(c) - 1 for c in self.occ_cols.values()]
        if min(g_minus_one, default=0) < 1:
            raise ConfigInvalid("every integer of the first source PDA must occur at least twice")
        self.alpha = cfg.iv_bits if cfg.iv_bits is not None else 8 * lcm(*g_minus_one)
        self.n_files = cfg.n_files if cfg.n_files is not None else self.F
        self.batches = partition_files(self.n_files, self.F)
        self.eta = self.n_files // self.F
        for s, cols in self.occ_cols.items():
            if (self.eta * self.alpha) % (len(cols) - 1):
                raise PacketIndivisible(
                    f"eta*alpha = {self.eta * self.alpha} bits cannot be split into {len(cols) - 1} packets"
                )
        if self.alpha < 1 or cfg.file_bits < 1 or cfg.output_bits < 1:
            raise ConfigInvalid("bit sizes must be positive")
        if len(cfg.demands) != self.k1 or not all(1 <= d <= self.k2 for d in cfg.demands):
            raise ConfigInvalid(f"need {self.k1} demands in [1, {self.k2}], got {cfg.demands}")
        if cfg.inject_a is not None and (
            len(cfg.inject_a) != self.k1 or not all(1 <= a <= self.k2 for a in cfg.inject_a)
        ):
            raise ConfigInvalid(f"injected a must be {self.k1} values in [1, {self.k2}]")
        if cfg.inject_y is not None:
            if len(cfg.inject_y) != self.k1:
                raise ConfigInvalid(f"need {self.k1} injected queries")
            for k, y in enumerate(cfg.inject_y):
                if sorted(y) != list(range(1, self.k2 + 1)):
                    raise ConfigInvalid(f"injected query {y} is not a permutation of [1, {self.k2}]")
                if cfg.inject_a is not None and y[cfg.inject_a[k] - 1] != cfg.demands[k]:
                    raise ConfigInvalid(f"injected query {y} does not hold d_{k + 1} at position a_{k + 1}")
        self.ext_positions = {t: sorted(p, key=lambda fj: (fj[1], fj[0])) for t, p in cfg.pda.positions().items()}

    def s_of(self, t: int) -> int:
        return (t - 1) // self.s2 + 1

    def packet_bits(self, s: int) -> int:
        return self.eta * self.alpha // (len(self.occ_cols[s]) - 1)

    def labels(self, s: int, owner_block: int) -> list[int]:
        """0-based column blocks labelling the packets of a symbol owned by ``owner_block``."""
        return [c for c in self.occ_cols[s] if c != owner_block]

    def contributors(self, t: int, sender_block: int) -> list[tuple[int, int]]:
        """The pair set J_t^k as 0-based (row, column), ordered by column then row."""
        others = set(self.labels(self.s_of(t), sender_block))
        return [(f, j) for f, j in self.ext_positions[t] if j // self.k2 in others]


# ----------------------------------------------------------------------------
# node state and randomness


def node_rng(master_seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed % 2**64, k]))


def draw_impersonation(k2: int, rng: np.random.Generator) -> int:
    return int(rng.integers(1, k2 + 1))


def generate_query(k2: int, d_k: int, a_k: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniform permutation of [k2] with d_k fixed at (1-based) position a_k."""
    rest = [q for q in range(1, k2 + 1) if q != d_k]
    rest = [rest[i] for i in rng.permutation(len(rest))]
    rest.insert(a_k - 1, d_k)
    return tuple(rest)


@dataclass
class RealNodeState:
    k: int
    demand: int
    a: int
    beta: int
    stored_batches: tuple[int, ...]
    ivs: dict[tuple[int, int], int] = field(repr=False)
    query: tuple[int, ...] | None = None
    rng: np.random.Generator | None = field(default=None, repr=False, compare=False)

    @property
    def stored_files(self) -> list[int]:
        return sorted(n for (q, n) in self.ivs if q == 1)

    def iv(self, q: int, n: int) -> int:
        try:
            return self.ivs[(q, n)]
        except KeyError:
            raise KeyError(f"real node {self.k} cannot compute v_{{{q},{n}}}") from None


def map_phase(config: SimConfig) -> list[RealNodeState]:
    lay = config.layout
    states = []
    for k in range(1, lay.k1 + 1):
        rng = node_rng(config.master_seed, k)
        d = config.demands[k - 1]
        if config.inject_a is not None:
            a = config.inject_a[k - 1]
        elif config.inject_y is not None:
            a = config.inject_y[k - 1].index(d) + 1
        else:
            a = draw_impersonation(lay.k2, rng)
        beta = (k - 1) * lay.k2 + a
        stored = tuple(f + 1 for f in config.pda.star_rows(beta - 1))
        ivs = {}
        for f in stored:
            for n in lay.batches[f - 1].files:
                w = file_contents(config.master_seed, n, config.file_bits)
                for q in range(1, lay.k2 + 1):
                    ivs[(q, n)] = map_function(q, w, config.file_bits, lay.alpha)
        states.append(RealNodeState(k, d, a, beta, stored, ivs, rng=rng))
    return states


def exchange_queries(states: list[RealNodeState], config: SimConfig) -> list[tuple[int, ...]]:
    """Every real node picks and broadcasts its query; returns the query list."""
    for st in states:
        if config.inject_y is not None:
            st.query = config.inject_y[st.k - 1]
        else:
            st.query = generate_query(config.k2, st.demand, st.a, st.rng)
        if st.query[st.a - 1] != st.demand:
            raise InternalInconsistency(f"query of node {st.k} hides the wrong demand")
    return [st.query for st in states]


def function_of(queries: Sequence[Sequence[int]], j: int, k2: int) -> int:
    """Output function assigned to 1-based effective node j."""
    return queries[(j - 1) // k2][(j - 1) % k2]


def demand_table(pda: Pda, meta: ExtendedPdaMeta, queries, eta: int = 1) -> dict[int, list[tuple[int, int]]]:
    """Effective node j -> sorted (q, n) pairs of the IVs it is missing."""
    if len(queries) != meta.k1:
        raise ValueError("need one query per real node")
    table = {}
    for j in range(1, pda.k + 1):
        q = function_of(queries, j, meta.k2)
        table[j] = sorted(
            (q, n)
            for f in range(pda.f)
            if not is_star(pda[f, j - 1])
            for n in range(f * eta + 1, (f + 1) * eta + 1)
        )
    return table


# ----------------------------------------------------------------------------
# shuffle


@dataclass(frozen=True)
class Contribution:
    batch: int       # f
    effective: int   # j
    function: int    # y_j
    label: int       # real node whose slice this is


@dataclass(frozen=True)
class CodedSymbol:
    sender: int
    t: int
    s: int
    bits: int
    payload: int
    contributors: tuple[Contribution, ...]

    def describe(self, eta: int = 1) -> str:
        if eta == 1:
            terms = [f"v_{{{c.function},{c.batch}}}^{c.label}" for c in self.contributors]
        else:
            terms = [f"U_{{{c.function},B{c.batch}}}^{c.label}" for c in self.contributors]
        return f"X_{self.t}^{self.sender} = " + " + ".join(terms)


def _concat(state: RealNodeState, q: int, batch: Batch, alpha: int) -> int:
    u = 0
    for n in batch.files:
        u = (u << alpha) | state.iv(q, n)
    return u


def _slice(u: int, index: int, count: int, bits: int) -> int:
    return (u >> (bits * (count - 1 - index))) & ((1 << bits) - 1)


def shuffle_phase(states: list[RealNodeState], config: SimConfig) -> list[CodedSymbol]:
    lay = config.layout
    queries = [st.query for st in states]
    if any(q is None for q in queries):
        raise InternalInconsistency("queries must be exchanged before the shuffle")
    symbols = []
    for st in states:
        kc = st.k - 1
        for s in lay.p1.column_integers(kc):
            bits = lay.packet_bits(s)
            n_packets = len(lay.occ_cols[s]) - 1
            for t in range((s - 1) * lay.s2 + 1, s * lay.s2 + 1):
                payload = 0
                contrib = []
                for f, j in lay.contributors(t, kc):
                    q = function_of(queries, j + 1, lay.k2)
                    idx = lay.labels(s, j // lay.k2).index(kc)
                    try:
                        u = _concat(st, q, lay.batches[f], lay.alpha)
                    except KeyError as exc:
                        raise InternalInconsistency(str(exc)) from None
                    payload ^= _slice(u, idx, n_packets, bits)
                    contrib.append(Contribution(f + 1, j + 1, q, st.k))
                symbols.append(CodedSymbol(st.k, t, s, bits, payload, tuple(contrib)))
    return symbols


# ----------------------------------------------------------------------------
# reduce


def decode_node(state: RealNodeState, symbols: Sequence[CodedSymbol], config: SimConfig) -> dict[int, int]:
    """All IVs v_{d_k, n}, n in [N], as seen by real node k after decoding."""
    lay = config.layout
    by_key = {(x.sender, x.t): x for x in symbols}
    d, bcol = state.demand, state.beta - 1
    kc = state.k - 1
    out = {}
    for f in range(lay.F):
        batch = lay.batches[f]
        t = config.pda[f, bcol]
        if is_star(t):
            for n in batch.files:
                out[n] = state.iv(d, n)
            continue
        s = lay.s_of(t)
        labels = lay.labels(s, kc)
        bits, n_packets = lay.packet_bits(s), len(labels)
        u = 0
        for kl in labels:
            x = by_key.get((kl + 1, t))
            if x is None:
                raise DecodeFailure(f"node {state.k}: coded symbol X_{t}^{kl + 1} was not received")
            if (f, bcol) not in lay.contributors(t, kl):
                raise DecodeFailure(f"node {state.k}: X_{t}^{kl + 1} does not carry its packet")
            piece = x.payload
            for c in x.contributors:
                if (c.batch - 1, c.effective - 1) == (f, bcol):
                    continue
                idx = lay.labels(s, (c.effective - 1) // lay.k2).index(kl)
                try:
                    other = _concat(state, c.function, lay.batches[c.batch - 1], lay.alpha)
                except KeyError as exc:
                    raise DecodeFailure(f"cannot cancel interference: {exc}") from None
                piece ^= _slice(other, idx, n_packets, bits)
            u = (u << bits) | piece
        for i, n in enumerate(batch.files):
            out[n] = _slice(u, i, lay.eta, lay.alpha)
    return out


def reduce_phase(states: list[RealNodeState], symbols: Sequence[CodedSymbol], config: SimConfig) -> dict[int, int]:
    lay = config.layout
    outputs = {}
    for st in states:
        ivs = decode_node(st, symbols, config)
        outputs[st.k] = reduce_function(
            st.demand, [ivs[n] for n in range(1, lay.n_files + 1)], lay.alpha, config.output_bits
        )
    return outputs


def oracle_ivs(config: SimConfig, q: int) -> list[int]:
    lay = config.layout
    return [
        map_function(q, file_contents(config.master_seed, n, config.file_bits), config.file_bits, lay.alpha)
        for n in range(1, lay.n_files + 1)
    ]


def oracle_compute(config: SimConfig) -> dict[int, int]:
    """Centralised evaluation of every real node's output function from all files."""
    lay = config.layout
    return {
        k: reduce_function(d, oracle_ivs(config, d), lay.alpha, config.output_bits)
        for k, d in enumerate(config.demands, start=1)
    }


# ----------------------------------------------------------------------------
# full run


@dataclass(frozen=True)
class SimulationReport:
    params: tuple[int, int, int, int]
    meta: ExtendedPdaMeta
    demands: tuple[int, ...]
    eta: int
    alpha: int
    n_files: int
    a: tuple[int, ...]
    stored_batches: dict[int, tuple[int, ...]]
    queries: tuple[tuple[int, ...], ...]
    symbols: tuple[CodedSymbol, ...]
    outputs: dict[int, int]
    oracle: dict[int, int]
    decode_success: dict[int, bool]
    total_bits: int
    computation_load: Fraction
    communication_load: Fraction
    communication_load_per_function: Fraction
    predicted: LoadPoint

    @property
    def symbol_count(self) -> int:
        return len(self.symbols)

    @property
    def measured(self) -> LoadPoint:
        return LoadPoint(self.computation_load, self.communication_load, Source.MEASURED)

    @property
    def loads_match(self) -> bool:
        return (self.computation_load, self.communication_load) == (self.predicted.r, self.predicted.l)

    @property
    def all_decoded(self) -> bool:
        return all(self.decode_success.values())

    def transcript_digest(self) -> str:
        h = hashlib.sha256()
        for y in self.queries:
            h.update(repr(y).encode())
        for x in self.symbols:
            h.update(f"{x.sender}:{x.t}:{x.bits}:{x.payload:x}".encode())
        return h.hexdigest()


def run_simulation(config: SimConfig) -> SimulationReport:
    lay = config.layout
    states = map_phase(config)
    queries = exchange_queries(states, config)
    symbols = shuffle_phase(states, config)
    outputs = reduce_phase(states, symbols, config)
    oracle = oracle_compute(config)
    total_bits = sum(x.bits for x in symbols)
    n = lay.n_files
    r = Fraction(sum(len(st.stored_batches) for st in states) * lay.eta, n)
    # normalised per real node, which is what the closed-form loads assume
    l = Fraction(total_bits, lay.k1 * n * lay.alpha)
    l_per_q = Fraction(total_bits, lay.k2 * n * lay.alpha)
    predicted = theorem1_loads(lay.p1.params, multiplicity_profile(lay.p1), lay.p2.params, lay.k1)
    return SimulationReport(
        params=config.pda.params,
        meta=config.meta,
        demands=config.demands,
        eta=lay.eta,
        alpha=lay.alpha,
        n_files=n,
        a=tuple(st.a for st in states),
        stored_batches={st.k: st.stored_batches for st in states},
        queries=tuple(queries),
        symbols=tuple(symbols),
        outputs=outputs,
        oracle=oracle,
        decode_success={k: outputs[k] == oracle[k] for k in outputs},
        total_bits=total_bits,
        computation_load=r,
        communication_load=l,
        communication_load_per_function=l_per_q,
        predicted=predicted,
    )
