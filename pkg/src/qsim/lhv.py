"""Correlation experiments and local models with a classical-bit budget.

The objects here connect three views of a multi-party measurement
experiment:

* quantum predictions — exact joint outcome distributions computed by
  the dense backend (:func:`quantum_table`);
* inequality functionals over those tables (:func:`correlator`,
  :func:`chsh_value`, :func:`mermin_correlators`);
* explicit classical explanations — mixtures of deterministic
  strategies whose parties may exchange a fixed number of one-bit
  messages (:class:`LocalModel`), searched for by linear programming
  (:func:`find_local_model`) and executed shot-by-shot
  (:func:`simulate_model`).

Conventions used throughout: a party's outcome is +1 or -1; outcome
tuples are indexed with party 0 as the most significant bit and bit
value 0 meaning +1; setting profiles enumerate as the lexicographic
product of the per-party alphabets.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csc_matrix

from .circuit import PauliAxis, ghz, gk_entangler
from .errors import QsimError, TooManyStrategies, UnknownProfile
from .rng import stream
from .statevector import (
    BlochAxis,
    MeasurementSpec,
    PureState,
    evolve,
    joint_probabilities,
)

Setting = PauliAxis | BlochAxis
Profile = tuple[Setting, ...]

PAULI_ALPHABET: tuple[PauliAxis, ...] = (PauliAxis.X, PauliAxis.Y, PauliAxis.Z)

_MAX_PROFILES = 4096
_MAX_STRATEGIES = 1_000_000
_SNAP_DENOMINATOR = 4096


def outcome_index(outcomes: tuple[int, ...]) -> int:
    """Pack a tuple of +1/-1 outcomes into the canonical row index."""
    idx = 0
    for o in outcomes:
        idx = (idx << 1) | (1 if o == -1 else 0)
    return idx


def index_outcomes(index: int, parties: int) -> tuple[int, ...]:
    return tuple(-1 if (index >> (parties - 1 - p)) & 1 else 1 for p in range(parties))


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Joint outcome distributions, one per setting profile.

    ``dists[profile]`` is a length-``2**parties`` probability vector in
    outcome-index order.  Profiles run over the lexicographic product
    of ``alphabets``.
    """

    alphabets: tuple[tuple[Setting, ...], ...]
    dists: dict[Profile, np.ndarray]

    def __post_init__(self):
        if len(self.alphabets) < 2:
            raise ValueError("need at least two parties")
        size = 1 << self.parties
        for profile, dist in self.dists.items():
            if dist.shape != (size,):
                raise ValueError(f"distribution for {profile} has wrong length")
            if dist.min() < -1e-12:
                raise ValueError(f"negative probability in profile {profile}")
            if abs(float(dist.sum()) - 1.0) > 1e-10:
                raise ValueError(f"distribution for {profile} does not sum to 1")

    @property
    def parties(self) -> int:
        return len(self.alphabets)

    def profiles(self):
        """All profiles in canonical (lexicographic product) order."""
        return itertools.product(*self.alphabets)

    def _dist(self, profile: Profile) -> np.ndarray:
        try:
            return self.dists[tuple(profile)]
        except KeyError:
            raise UnknownProfile(f"no distribution for profile {profile}") from None

    def prob(self, profile: Profile, outcomes: tuple[int, ...]) -> float:
        return float(self._dist(profile)[outcome_index(outcomes)])


def table_vector(table: CorrelationTable) -> np.ndarray:
    """Flatten a table to one vector: profiles in canonical order, then
    outcome index — the coordinate system certificates refer to."""
    return np.concatenate([table._dist(p) for p in table.profiles()])


def _table_from_matrix(
    alphabets: tuple[tuple[Setting, ...], ...], matrix: np.ndarray
) -> CorrelationTable:
    dists = {
        profile: matrix[i].copy()
        for i, profile in enumerate(itertools.product(*alphabets))
    }
    return CorrelationTable(alphabets, dists)


# ---------------------------------------------------------------------------
# Quantum predictions and inequality functionals


def singlet_state() -> PureState:
    return evolve(gk_entangler())


def ghz_state(parties: int = 3) -> PureState:
    return evolve(ghz(parties))


def quantum_table(
    state: PureState, alphabets: Sequence[Sequence[Setting]]
) -> CorrelationTable:
    """Exact joint distributions for every setting profile.

    One party per qubit; each profile is evaluated by exact projective
    decomposition of the state.
    """
    alphabets = tuple(tuple(a) for a in alphabets)
    if len(alphabets) != state.n:
        raise ValueError(f"state has {state.n} qubits but {len(alphabets)} alphabets given")
    if any(len(a) == 0 for a in alphabets):
        raise ValueError("every party needs a nonempty alphabet")
    n_profiles = math.prod(len(a) for a in alphabets)
    if n_profiles > _MAX_PROFILES:
        raise ValueError(f"{n_profiles} profiles exceeds the cap of {_MAX_PROFILES}")
    parties = state.n
    dists: dict[Profile, np.ndarray] = {}
    for profile in itertools.product(*alphabets):
        specs = tuple(MeasurementSpec(q, axis) for q, axis in enumerate(profile))
        dist = np.zeros(1 << parties)
        for outcomes, p in joint_probabilities(state, specs).items():
            dist[outcome_index(outcomes)] = p
        dists[profile] = dist
    return CorrelationTable(alphabets, dists)


def correlator(table: CorrelationTable, profile: Profile) -> float:
    """Expectation of the product of all parties' +1/-1 outcomes."""
    dist = table._dist(profile)
    idx = np.arange(dist.size)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx) & 1).astype(np.float64)
    return float(dist @ signs)


def chsh_value(
    table: CorrelationTable, a: Setting, a2: Setting, b: Setting, b2: Setting
) -> float:
    """S = E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    if table.parties != 2:
        raise ValueError("CHSH needs a two-party table")
    return (
        correlator(table, (a, b))
        + correlator(table, (a, b2))
        + correlator(table, (a2, b))
        - correlator(table, (a2, b2))
    )


def chsh_sweep(steps: int) -> list[tuple[float, float]]:
    """CHSH value of the singlet along a one-parameter basis rotation.

    At sweep angle t the parties use equatorial Bloch settings with
    azimuths (0, 2t) and (t, -t).  The curve starts at S = -2 (aligned
    bases), reaches |S| = 2*sqrt(2) at t = pi/4, and passes through 0
    at t = pi/2 as the bases realign.  Returns (t, S) pairs on the grid
    t = k*pi/steps, k = 0..steps.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    state = singlet_state()
    tau = 2.0 * math.pi
    out: list[tuple[float, float]] = []
    for k in range(steps + 1):
        t = math.pi * k / steps
        a = BlochAxis(math.pi / 2, 0.0)
        a2 = BlochAxis(math.pi / 2, (2.0 * t) % tau)
        b = BlochAxis(math.pi / 2, t % tau)
        b2 = BlochAxis(math.pi / 2, (-t) % tau)
        table = quantum_table(state, ((a, a2), (b, b2)))
        out.append((t, chsh_value(table, a, a2, b, b2)))
    return out


def mermin_correlators(table: CorrelationTable) -> tuple[float, float, float, float]:
    """The four three-party parity correlators (XXX, XYY, YXY, YYX)."""
    if table.parties != 3:
        raise ValueError("Mermin correlators need a three-party table")
    x, y = PauliAxis.X, PauliAxis.Y
    return (
        correlator(table, (x, x, x)),
        correlator(table, (x, y, y)),
        correlator(table, (y, x, y)),
        correlator(table, (y, y, x)),
    )


def signalling_deficit(table: CorrelationTable) -> float:
    """Largest change in any party's marginal when only the OTHER
    parties' settings vary.  Zero (to rounding) for quantum tables."""
    parties = table.parties
    worst = 0.0
    for p in range(parties):
        idx = np.arange(1 << parties)
        plus_mask = ((idx >> (parties - 1 - p)) & 1) == 0
        groups: dict[tuple[Setting, ...], list[float]] = {}
        for profile in table.profiles():
            marginal = float(table._dist(profile)[plus_mask].sum())
            groups.setdefault((profile[p],), []).append(marginal)
        # regroup: same own setting, marginal should not depend on the rest
        for vals in groups.values():
            worst = max(worst, max(vals) - min(vals))
    return worst


# ---------------------------------------------------------------------------
# Communication topologies and deterministic strategies


@dataclass(frozen=True)
class CommTopology:
    """An ordered list of one-bit messages (sender, receiver).

    Messages are delivered in sequence: the sender of message k knows
    its own setting and every bit it received from messages before k;
    outputs are produced after all messages, each party seeing its full
    received-bit record.  The budget is simply the message count.
    """

    parties: int
    messages: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.parties < 2:
            raise ValueError("need at least two parties")
        for k, (snd, rcv) in enumerate(self.messages):
            if not (0 <= snd < self.parties and 0 <= rcv < self.parties):
                raise ValueError(f"message {k} references a missing party")
            if snd == rcv:
                raise ValueError(f"message {k} has sender = receiver")

    @property
    def budget(self) -> int:
        return len(self.messages)


@dataclass(frozen=True)
class DeterministicStrategy:
    """One extreme point of the communication-assisted local polytope.

    ``outputs[p][a][rec]`` is party p's +1/-1 answer when its setting
    index is ``a`` and the bits it received (packed first-arrival =
    bit 0) equal ``rec``.  ``messages[k][a][rec]`` is the bit sent in
    topology slot k given the sender's setting index and the bits the
    sender had received before slot k.
    """

    outputs: tuple[tuple[tuple[int, ...], ...], ...]
    messages: tuple[tuple[tuple[int, ...], ...], ...] = ()


class _CellLayout:
    """Assigns every free binary choice of a strategy a cell index.

    Cell order: each party's output table (parties in index order,
    settings outer, received-bit patterns inner), then each message's
    table (topology order, settings outer, prior-bit patterns inner).
    Strategy number s assigns cell j the bit (s >> (C-1-j)) & 1, so the
    enumeration is lexicographic in the concatenated tables, with
    output bit 0 meaning +1.
    """

    def __init__(self, parties: int, sizes: tuple[int, ...], topology: CommTopology):
        if topology.parties != parties:
            raise ValueError("topology party count does not match")
        if len(sizes) != parties:
            raise ValueError("need one alphabet size per party")
        if any(m < 1 for m in sizes):
            raise ValueError("alphabet sizes must be positive")
        self.parties = parties
        self.sizes = sizes
        self.topology = topology
        seen = [0] * parties
        self.pre: list[int] = []  # bits sender holds before each message
        self.arrival: list[int] = []  # bit position at the receiver
        for snd, rcv in topology.messages:
            self.pre.append(seen[snd])
            self.arrival.append(seen[rcv])
            seen[rcv] += 1
        self.inbits = tuple(seen)
        pos = 0
        self.out_base: list[int] = []
        for p in range(parties):
            self.out_base.append(pos)
            pos += sizes[p] << self.inbits[p]
        self.msg_base: list[int] = []
        for k, (snd, _) in enumerate(topology.messages):
            self.msg_base.append(pos)
            pos += sizes[snd] << self.pre[k]
        self.n_cells = pos

    def out_cell(self, p: int, a: int, rec: int) -> int:
        return self.out_base[p] + (a << self.inbits[p]) + rec

    def msg_cell(self, k: int, a: int, rec: int) -> int:
        snd = self.topology.messages[k][0]
        del snd
        return self.msg_base[k] + (a << self.pre[k]) + rec

    def bitpos(self, cell: int) -> int:
        return self.n_cells - 1 - cell

    @property
    def count(self) -> int:
        return 1 << self.n_cells

    def strategy(self, s: int) -> DeterministicStrategy:
        outputs = tuple(
            tuple(
                tuple(
                    1 - 2 * ((s >> self.bitpos(self.out_cell(p, a, rec))) & 1)
                    for rec in range(1 << self.inbits[p])
                )
                for a in range(self.sizes[p])
            )
            for p in range(self.parties)
        )
        messages = tuple(
            tuple(
                tuple(
                    (s >> self.bitpos(self.msg_cell(k, a, rec))) & 1
                    for rec in range(1 << self.pre[k])
                )
                for a in range(self.sizes[snd])
            )
            for k, (snd, _) in enumerate(self.topology.messages)
        )
        return DeterministicStrategy(outputs, messages)


class StrategyEnumeration(Sequence):
    """Lazy, duplicate-free sequence of all deterministic strategies.

    Index order is the lexicographic cell order documented on
    :class:`_CellLayout`; strategy 0 answers +1 everywhere and sends
    all-zero messages.
    """

    def __init__(self, layout: _CellLayout):
        self._layout = layout

    def __len__(self) -> int:
        return self._layout.count

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if not -len(self) <= i < len(self):
            raise IndexError(i)
        return self._layout.strategy(i % len(self))


def enumerate_strategies(
    parties: int, alphabet_sizes: Sequence[int], topology: CommTopology
) -> StrategyEnumeration:
    """Every deterministic strategy compatible with the topology.

    The count is 2**(total table cells); anything above 10**6 raises
    :class:`TooManyStrategies` before any work is done.
    """
    layout = _CellLayout(parties, tuple(alphabet_sizes), topology)
    if layout.count > _MAX_STRATEGIES:
        raise TooManyStrategies(
            f"{layout.count} strategies exceeds the cap of {_MAX_STRATEGIES}"
        )
    return StrategyEnumeration(layout)


def _run_strategy(
    strategy: DeterministicStrategy,
    topology: CommTopology,
    setting_idx: tuple[int, ...],
) -> tuple[int, ...]:
    """Execute one strategy on one profile; returns the outcome tuple."""
    parties = topology.parties
    rec = [0] * parties
    seen = [0] * parties
    for k, (snd, rcv) in enumerate(topology.messages):
        bit = strategy.messages[k][setting_idx[snd]][rec[snd]]
        rec[rcv] |= bit << seen[rcv]
        seen[rcv] += 1
    return tuple(
        strategy.outputs[p][setting_idx[p]][rec[p]] for p in range(parties)
    )


def strategy_table(
    strategy: DeterministicStrategy,
    topology: CommTopology,
    alphabets: Sequence[Sequence[Setting]],
) -> CorrelationTable:
    """The (deterministic) correlation table one strategy induces."""
    alphabets = tuple(tuple(a) for a in alphabets)
    parties = len(alphabets)
    size = 1 << parties
    dists: dict[Profile, np.ndarray] = {}
    for idx in itertools.product(*(range(len(a)) for a in alphabets)):
        outcomes = _run_strategy(strategy, topology, idx)
        dist = np.zeros(size)
        dist[outcome_index(outcomes)] = 1.0
        profile = tuple(alphabets[p][idx[p]] for p in range(parties))
        dists[profile] = dist
    return CorrelationTable(alphabets, dists)


# ---------------------------------------------------------------------------
# Local models


@dataclass(frozen=True, eq=False)
class LocalModel:
    """A mixture of deterministic strategies under one topology.

    ``exact_weights`` is set when the weights are known as exact
    rationals (hand-built models and successful exact LP polishes); the
    float weights are their roundings.
    """

    strategies: tuple[DeterministicStrategy, ...]
    weights: tuple[float, ...]
    topology: CommTopology
    alphabets: tuple[tuple[Setting, ...], ...]
    exact_weights: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if len(self.strategies) != len(self.weights):
            raise ValueError("one weight per strategy")
        if not self.strategies:
            raise ValueError("a model needs at least one strategy")
        if min(self.weights) < 0.0:
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if self.exact_weights is not None:
            if len(self.exact_weights) != len(self.weights):
                raise ValueError("exact weight count mismatch")
            if sum(self.exact_weights) != 1:
                raise ValueError("exact weights must sum to 1")


def model_table(model: LocalModel, exact: bool = False) -> CorrelationTable:
    """The table the model induces: the weighted strategy-table mix.

    With ``exact=True`` (requires ``exact_weights``) the mixture is
    accumulated in rational arithmetic, so dyadic entries come out as
    exact floats.
    """
    alphabets = model.alphabets
    parties = len(alphabets)
    size = 1 << parties
    profiles = list(itertools.product(*alphabets))
    if exact:
        if model.exact_weights is None:
            raise ValueError("model carries no exact weights")
        acc = [[Fraction(0)] * size for _ in profiles]
        for w, strat in zip(model.exact_weights, model.strategies):
            for i, idx in enumerate(
                itertools.product(*(range(len(a)) for a in alphabets))
            ):
                acc[i][outcome_index(_run_strategy(strat, model.topology, idx))] += w
        dists = {
            profile: np.array([float(f) for f in acc[i]])
            for i, profile in enumerate(profiles)
        }
        return CorrelationTable(alphabets, dists)
    acc_f = np.zeros((len(profiles), size))
    for w, strat in zip(model.weights, model.strategies):
        for i, idx in enumerate(itertools.product(*(range(len(a)) for a in alphabets))):
            acc_f[i, outcome_index(_run_strategy(strat, model.topology, idx))] += w
    return _table_from_matrix(alphabets, acc_f)


def singlet_pauli_lhv() -> LocalModel:
    """The communication-free model reproducing the singlet's Pauli
    statistics: a shared sign for each axis, answered directly by one
    party and negated by the other — eight equally weighted strategies.
    """
    topology = CommTopology(2, ())
    strategies = []
    for lam in itertools.product((1, -1), repeat=3):
        a_out = tuple((lam[i],) for i in range(3))
        b_out = tuple((-lam[i],) for i in range(3))
        strategies.append(DeterministicStrategy((a_out, b_out), ()))
    eighth = Fraction(1, 8)
    return LocalModel(
        strategies=tuple(strategies),
        weights=(0.125,) * 8,
        topology=topology,
        alphabets=(PAULI_ALPHABET, PAULI_ALPHABET),
        exact_weights=(eighth,) * 8,
    )


# ---------------------------------------------------------------------------
# LP feasibility search


@dataclass(frozen=True, eq=False)
class Infeasible:
    """A separating inequality proving no model exists.

    ``coefficients`` lives in :func:`table_vector` coordinates:
    coefficients @ table_vector(T) >= bound holds for every
    deterministic strategy's table T, while the target misses the bound
    by ``violation``.
    """

    coefficients: np.ndarray
    bound: float
    violation: float


def _outcome_rows(layout: _CellLayout, alphabets) -> np.ndarray:
    """Row index of each (profile, strategy) pair's point outcome.

    Shape (n_profiles, n_strategies); entry = profile_index * 2**parties
    + outcome_index.  Message and output bits are read straight out of
    the strategy number, vectorized over all strategies at once.
    """
    parties = layout.parties
    s = np.arange(layout.count, dtype=np.int64)
    profiles = list(itertools.product(*(range(len(a)) for a in alphabets)))
    rows = np.empty((len(profiles), layout.count), dtype=np.int64)
    for i, idx in enumerate(profiles):
        rec = [np.zeros(layout.count, dtype=np.int64) for _ in range(parties)]
        for k, (snd, rcv) in enumerate(layout.topology.messages):
            shifts = np.array(
                [layout.bitpos(layout.msg_cell(k, idx[snd], r)) for r in range(1 << layout.pre[k])],
                dtype=np.int64,
            )
            bit = (s >> shifts[rec[snd]]) & 1
            rec[rcv] |= bit << layout.arrival[k]
        out = np.zeros(layout.count, dtype=np.int64)
        for p in range(parties):
            shifts = np.array(
                [layout.bitpos(layout.out_cell(p, idx[p], r)) for r in range(1 << layout.inbits[p])],
                dtype=np.int64,
            )
            bit = (s >> shifts[rec[p]]) & 1  # bit 1 encodes the -1 outcome
            out |= bit << (parties - 1 - p)
        rows[i] = (i << parties) + out
    return rows


def _snap_dyadic(vec: np.ndarray) -> list[Fraction] | None:
    """Round to small-denominator rationals if every entry is within
    1e-9 of one; otherwise None (the table is not exact-arithmetic
    material)."""
    fracs = []
    for x in vec:
        f = Fraction(float(x)).limit_denominator(_SNAP_DENOMINATOR)
        if abs(float(f) - float(x)) >= 1e-9:
            return None
        fracs.append(f)
    return fracs


def _solve_exact_support(
    rows: np.ndarray, support: np.ndarray, fracs: list[Fraction], n_rows: int
) -> list[Fraction] | None:
    """Solve the feasibility system exactly on a candidate support.

    Returns nonnegative rational weights summing to 1 that reproduce
    the target exactly, or None if the support does not admit them.
    """
    k = support.size
    aug = [[Fraction(0)] * (k + 1) for _ in range(n_rows + 1)]
    for j, sidx in enumerate(support):
        for r in rows[:, sidx]:
            aug[int(r)][j] = Fraction(1)
        aug[n_rows][j] = Fraction(1)
    for r in range(n_rows):
        aug[r][k] = fracs[r]
    aug[n_rows][k] = Fraction(1)

    pivot_rows: list[int] = []
    used = [False] * (n_rows + 1)
    for col in range(k):
        pivot = next(
            (r for r in range(n_rows + 1) if not used[r] and aug[r][col] != 0), None
        )
        if pivot is None:
            return None  # dependent columns; fall back to float weights
        used[pivot] = True
        pivot_rows.append(pivot)
        inv = 1 / aug[pivot][col]
        aug[pivot] = [v * inv for v in aug[pivot]]
        for r in range(n_rows + 1):
            if r != pivot and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[pivot])]
    for r in range(n_rows + 1):
        if not used[r] and aug[r][k] != 0:
            return None  # inconsistent on this support
    w = [aug[pivot_rows[col]][k] for col in range(k)]
    if any(x < 0 for x in w) or sum(w) != 1:
        return None
    # confirm against the full system
    recon = [Fraction(0)] * n_rows
    for j, sidx in enumerate(support):
        if w[j] == 0:
            continue
        for r in rows[:, sidx]:
            recon[int(r)] += w[j]
    if recon != fracs:
        return None
    return w


def find_local_model(
    target: CorrelationTable,
    topology: CommTopology,
    dedupe_tables: bool = False,
) -> LocalModel | Infeasible:
    """Search for a strategy mixture reproducing ``target`` exactly.

    The search is a linear feasibility problem over all deterministic
    strategies.  On success the float solution is polished to exact
    rational weights whenever the target snaps to small rationals (all
    Pauli-alphabet tables do); on failure a separating inequality is
    extracted and re-verified against every strategy.

    ``dedupe_tables=True`` collapses strategies inducing identical
    tables before solving (default off, keeping LP columns aligned with
    the enumeration order).
    """
    alphabets = target.alphabets
    sizes = tuple(len(a) for a in alphabets)
    layout = _CellLayout(target.parties, sizes, topology)
    if layout.count > _MAX_STRATEGIES:
        raise TooManyStrategies(
            f"{layout.count} strategies exceeds the cap of {_MAX_STRATEGIES}"
        )
    rows = _outcome_rows(layout, alphabets)
    n_profiles = rows.shape[0]
    n_rows = n_profiles << target.parties
    t = table_vector(target)

    col_ids = np.arange(layout.count)
    if dedupe_tables:
        _, keep = np.unique(rows.T, axis=0, return_index=True)
        col_ids = np.sort(keep)
    cols = rows[:, col_ids]
    n_cols = col_ids.size

    data = np.ones(cols.size + n_cols)
    row_idx = np.concatenate([cols.ravel(order="F"), np.full(n_cols, n_rows)])
    col_idx = np.concatenate(
        [np.repeat(np.arange(n_cols), n_profiles), np.arange(n_cols)]
    )
    a_eq = csc_matrix((data, (row_idx, col_idx)), shape=(n_rows + 1, n_cols))
    b_eq = np.append(t, 1.0)

    res = linprog(
        np.zeros(n_cols), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs"
    )
    if res.status == 2:
        return _separating_inequality(cols, t, n_rows)
    if res.status != 0:
        raise QsimError(f"feasibility LP did not converge: {res.message}")

    w = res.x
    support_local = np.flatnonzero(w > 1e-10)
    if support_local.size == 0:
        support_local = np.array([int(np.argmax(w))])
    support = col_ids[support_local]

    fracs = _snap_dyadic(t)
    if fracs is not None:
        exact = _solve_exact_support(rows, support, fracs, n_rows)
        if exact is not None:
            keep_mask = [x != 0 for x in exact]
            strategies = tuple(
                layout.strategy(int(s)) for s, m in zip(support, keep_mask) if m
            )
            exact_w = tuple(x for x in exact if x != 0)
            return LocalModel(
                strategies=strategies,
                weights=tuple(float(x) for x in exact_w),
                topology=topology,
                alphabets=alphabets,
                exact_weights=exact_w,
            )

    w_sup = w[support_local]
    w_sup = w_sup / w_sup.sum()
    recon = np.zeros(n_rows)
    for wi, sidx in zip(w_sup, support):
        np.add.at(recon, rows[:, sidx], wi)
    if np.max(np.abs(recon - t)) > 1e-9:
        raise QsimError("feasible LP solution fails reconstruction at 1e-9")
    return LocalModel(
        strategies=tuple(layout.strategy(int(s)) for s in support),
        weights=tuple(float(x) for x in w_sup),
        topology=topology,
        alphabets=alphabets,
        exact_weights=None,
    )


def _separating_inequality(cols: np.ndarray, t: np.ndarray, n_rows: int) -> Infeasible:
    """Best-margin hyperplane with coefficients in [-1, 1] separating
    the target from every strategy column."""
    n_profiles, n_cols = cols.shape
    # variables: y (n_rows) then c; maximize c - y.t
    obj = np.append(t, -1.0)
    data = np.concatenate([-np.ones(cols.size), np.ones(n_cols)])
    row_idx = np.concatenate([np.repeat(np.arange(n_cols), n_profiles), np.arange(n_cols)])
    col_idx = np.concatenate([cols.ravel(order="F"), np.full(n_cols, n_rows)])
    a_ub = csc_matrix((data, (row_idx, col_idx)), shape=(n_cols, n_rows + 1))
    bounds = [(-1.0, 1.0)] * n_rows + [(None, None)]
    res = linprog(obj, A_ub=a_ub, b_ub=np.zeros(n_cols), bounds=bounds, method="highs")
    if res.status != 0:
        raise QsimError(f"separation LP did not converge: {res.message}")
    y = res.x[:n_rows]
    per_strategy = y[cols].sum(axis=0)
    bound = float(per_strategy.min())
    violation = bound - float(y @ t)
    if violation <= 1e-9:
        raise QsimError("separation margin vanished; table may be feasible after all")
    return Infeasible(coefficients=y, bound=bound, violation=violation)


# ---------------------------------------------------------------------------
# Shot-by-shot execution


@dataclass(frozen=True, eq=False)
class SimulationReport:
    empirical: CorrelationTable
    bits_used_per_shot: int


def simulate_model(model: LocalModel, shots: int, seed: int) -> SimulationReport:
    """Sample the model: per shot, draw a strategy (shared randomness)
    and a uniform profile, deliver the messages in topology order, and
    record the outputs.  Every message costs one bit whatever its
    content, so bits_used_per_shot equals the topology budget exactly.

    All draws come from one seeded stream: first the strategy indices,
    then each party's settings in party order.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = stream(seed)
    parties = len(model.alphabets)
    sizes = tuple(len(a) for a in model.alphabets)
    n_strat = len(model.strategies)

    p = np.asarray(model.weights, dtype=np.float64)
    p = p / p.sum()
    strat = rng.choice(n_strat, size=shots, p=p)
    settings = [rng.integers(0, sizes[q], size=shots) for q in range(parties)]

    # stack the strategy tables for vectorized lookup
    layout = _CellLayout(parties, sizes, model.topology)
    out_tables = [
        np.array([st.outputs[q] for st in model.strategies], dtype=np.int8)
        for q in range(parties)
    ]
    msg_tables = [
        np.array([st.messages[k] for st in model.strategies], dtype=np.int8)
        for k in range(model.topology.budget)
    ]

    rec = [np.zeros(shots, dtype=np.int64) for _ in range(parties)]
    for k, (snd, rcv) in enumerate(model.topology.messages):
        bit = msg_tables[k][strat, settings[snd], rec[snd]]
        rec[rcv] |= bit.astype(np.int64) << layout.arrival[k]

    out_bits = np.zeros(shots, dtype=np.int64)
    for q in range(parties):
        o = out_tables[q][strat, settings[q], rec[q]].astype(np.int64)  # +1/-1
        out_bits |= ((1 - o) // 2) << (parties - 1 - q)

    prof_idx = np.zeros(shots, dtype=np.int64)
    for q in range(parties):
        prof_idx = prof_idx * sizes[q] + settings[q]

    n_profiles = math.prod(sizes)
    size = 1 << parties
    counts = np.bincount(prof_idx * size + out_bits, minlength=n_profiles * size)
    counts = counts.reshape(n_profiles, size).astype(np.float64)
    per_profile = counts.sum(axis=1)
    if (per_profile == 0).any():
        raise ValueError("a profile received no shots; increase the shot count")
    freq = counts / per_profile[:, None]
    return SimulationReport(
        empirical=_table_from_matrix(model.alphabets, freq),
        bits_used_per_shot=model.topology.budget,
    )
