"""Correlation tables, inequality functionals, strategy enumeration,
LP model search, and shot-by-shot model execution."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qsim.circuit import PauliAxis
from qsim.errors import TooManyStrategies, UnknownProfile
from qsim.lhv import (
    PAULI_ALPHABET,
    CommTopology,
    CorrelationTable,
    DeterministicStrategy,
    Infeasible,
    LocalModel,
    chsh_sweep,
    chsh_value,
    correlator,
    enumerate_strategies,
    find_local_model,
    ghz_state,
    index_outcomes,
    mermin_correlators,
    model_table,
    outcome_index,
    quantum_table,
    signalling_deficit,
    simulate_model,
    singlet_pauli_lhv,
    singlet_state,
    strategy_table,
    table_vector,
)
from qsim.statevector import BlochAxis, init_state

X, Y, Z = PauliAxis.X, PauliAxis.Y, PauliAxis.Z

NO_COMM_2 = CommTopology(2, ())
NO_COMM_3 = CommTopology(3, ())


@pytest.fixture(scope="module")
def singlet_pauli_table():
    return quantum_table(singlet_state(), (PAULI_ALPHABET, PAULI_ALPHABET))


@pytest.fixture(scope="module")
def ghz_pauli_table():
    return quantum_table(ghz_state(), (PAULI_ALPHABET,) * 3)


@pytest.fixture(scope="module")
def ghz_bit_model(ghz_pauli_table):
    model = find_local_model(ghz_pauli_table, CommTopology(3, ((1, 0),)))
    assert isinstance(model, LocalModel)
    return model


# ---------------------------------------------------------------------------
# Outcome indexing and tables


@pytest.mark.parametrize(
    "outcomes,idx",
    [((1, 1), 0), ((1, -1), 1), ((-1, 1), 2), ((-1, -1), 3), ((-1, 1, -1), 5)],
)
def test_outcome_index_frozen(outcomes, idx):
    assert outcome_index(outcomes) == idx
    assert index_outcomes(idx, len(outcomes)) == outcomes


def test_table_validates_normalization():
    bad = {(Z, Z): np.array([0.7, 0.2, 0.2, 0.2])}
    with pytest.raises(ValueError):
        CorrelationTable(((Z,), (Z,)), bad)


def test_unknown_profile_raises(singlet_pauli_table):
    with pytest.raises(UnknownProfile):
        singlet_pauli_table.prob((BlochAxis(0.1, 0.2), Z), (1, 1))
    with pytest.raises(UnknownProfile):
        correlator(singlet_pauli_table, (Z, BlochAxis(0.0, 0.0)))


def test_product_state_table():
    table = quantum_table(init_state(2), ((Z,), (Z,)))
    assert table.prob((Z, Z), (1, 1)) == 1.0
    assert correlator(table, (Z, Z)) == 1.0


def test_singlet_pauli_joints(singlet_pauli_table):
    # equal axes anticorrelate; unequal axes are uniform
    for a, b in itertools.product(PAULI_ALPHABET, repeat=2):
        e = correlator(singlet_pauli_table, (a, b))
        want = -1.0 if a == b else 0.0
        assert abs(e - want) < 1e-12
    assert abs(singlet_pauli_table.prob((Z, Z), (1, -1)) - 0.5) < 1e-12
    assert singlet_pauli_table.prob((Z, Z), (1, 1)) < 1e-12


def test_singlet_bloch_cosine_law():
    # equatorial settings: E = -cos(azimuth difference)
    state = singlet_state()
    for da in (0.0, 0.3, 1.1, 2.5):
        a = BlochAxis(math.pi / 2, 0.0)
        b = BlochAxis(math.pi / 2, da)
        table = quantum_table(state, ((a,), (b,)))
        assert abs(correlator(table, (a, b)) + math.cos(da)) < 1e-10


def test_table_vector_layout(singlet_pauli_table):
    vec = table_vector(singlet_pauli_table)
    assert vec.shape == (36,)
    # first block is the (X, X) distribution
    assert np.allclose(vec[:4], [0.0, 0.5, 0.5, 0.0], atol=1e-12)


def test_signalling_deficit_quantum_tables(singlet_pauli_table, ghz_pauli_table):
    assert signalling_deficit(singlet_pauli_table) < 1e-10
    assert signalling_deficit(ghz_pauli_table) < 1e-10


def test_signalling_deficit_detects_signalling():
    # party 1 announces party 0's setting: marginal shifts by 1
    alphabets = ((X, Y), (Z,))
    dists = {
        (X, Z): np.array([1.0, 0.0, 0.0, 0.0]),
        (Y, Z): np.array([0.0, 1.0, 0.0, 0.0]),
    }
    assert signalling_deficit(CorrelationTable(alphabets, dists)) == 1.0


# ---------------------------------------------------------------------------
# CHSH and Mermin functionals


def test_chsh_needs_two_parties(ghz_pauli_table):
    with pytest.raises(ValueError):
        chsh_value(ghz_pauli_table, X, Y, X, Y)


def test_pauli_settings_cap_chsh_at_two(singlet_pauli_table):
    best = 0.0
    for a, a2, b, b2 in itertools.product(PAULI_ALPHABET, repeat=4):
        best = max(best, abs(chsh_value(singlet_pauli_table, a, a2, b, b2)))
    assert abs(best - 2.0) < 1e-9
    assert best <= 2.0 + 1e-9


def test_chsh_sweep_matches_closed_form():
    points = chsh_sweep(24)
    assert len(points) == 25
    for t, s in points:
        assert abs(s - (math.cos(3 * t) - 3 * math.cos(t))) < 1e-9
    values = [s for _, s in points]
    assert abs(points[0][1] + 2.0) < 1e-9
    assert abs(max(abs(v) for v in values) - 2.0 * math.sqrt(2.0)) < 1e-6


def test_chsh_sweep_rejects_zero_steps():
    with pytest.raises(ValueError):
        chsh_sweep(0)


def test_mermin_correlators_ghz(ghz_pauli_table):
    got = mermin_correlators(ghz_pauli_table)
    assert np.allclose(got, (1.0, -1.0, -1.0, -1.0), atol=1e-12)


def test_mermin_needs_three_parties(singlet_pauli_table):
    with pytest.raises(ValueError):
        mermin_correlators(singlet_pauli_table)


def test_deterministic_strategies_cannot_negate_mermin_product():
    # every strategy's four parity correlators multiply to +1, because
    # each party's X and Y rows both appear an even number of times;
    # the GHZ point (1, -1, -1, -1) multiplies to -1
    alphabets = ((X, Y),) * 3
    for strat in enumerate_strategies(3, (2, 2, 2), NO_COMM_3):
        table = strategy_table(strat, NO_COMM_3, alphabets)
        m = (
            correlator(table, (X, X, X))
            * correlator(table, (X, Y, Y))
            * correlator(table, (Y, X, Y))
            * correlator(table, (Y, Y, X))
        )
        assert m == 1.0


# ---------------------------------------------------------------------------
# Topologies and strategy enumeration


def test_topology_validation():
    with pytest.raises(ValueError):
        CommTopology(1, ())
    with pytest.raises(ValueError):
        CommTopology(2, ((0, 0),))
    with pytest.raises(ValueError):
        CommTopology(2, ((0, 2),))
    assert CommTopology(3, ((1, 0), (2, 0))).budget == 2


@pytest.mark.parametrize(
    "parties,sizes,messages,count",
    [
        (2, (3, 3), (), 64),
        (3, (3, 3, 3), (), 512),
        (3, (3, 3, 3), ((1, 0),), 32768),
        (2, (2, 2), (), 16),
    ],
)
def test_enumeration_counts_frozen(parties, sizes, messages, count):
    strategies = enumerate_strategies(parties, sizes, CommTopology(parties, messages))
    assert len(strategies) == count


def test_enumeration_cap():
    with pytest.raises(TooManyStrategies):
        enumerate_strategies(2, (11, 11), NO_COMM_2)


def test_strategy_zero_answers_all_plus():
    strat = enumerate_strategies(2, (3, 3), NO_COMM_2)[0]
    table = strategy_table(strat, NO_COMM_2, (PAULI_ALPHABET, PAULI_ALPHABET))
    for profile in table.profiles():
        assert table.prob(profile, (1, 1)) == 1.0
    assert chsh_value(table, X, Y, X, Y) == 2.0


def test_strategy_tables_are_deterministic():
    for strat in enumerate_strategies(2, (2, 2), NO_COMM_2):
        table = strategy_table(strat, NO_COMM_2, ((X, Y), (X, Y)))
        for profile in table.profiles():
            dist = [table.prob(profile, index_outcomes(i, 2)) for i in range(4)]
            assert sorted(dist) == [0.0, 0.0, 0.0, 1.0]


def test_message_actually_reaches_receiver():
    # sender (party 1) forwards its setting bit; receiver (party 0)
    # echoes the received bit as its outcome sign
    topo = CommTopology(2, ((1, 0),))
    outputs = (
        # party 0: any setting, outcome -1 iff received bit is 1
        ((1, -1), (1, -1)),
        # party 1: always +1, never receives
        ((1,), (1,)),
    )
    messages = (((0,), (1,)),)  # bit = sender's setting index
    table = strategy_table(
        DeterministicStrategy(outputs, messages), topo, ((X, Y), (X, Y))
    )
    assert table.prob((X, X), (1, 1)) == 1.0
    assert table.prob((X, Y), (-1, 1)) == 1.0
    assert table.prob((Y, Y), (-1, 1)) == 1.0


# ---------------------------------------------------------------------------
# Local models


def test_local_model_validation():
    strat = enumerate_strategies(2, (3, 3), NO_COMM_2)[0]
    alph = (PAULI_ALPHABET, PAULI_ALPHABET)
    with pytest.raises(ValueError):
        LocalModel((strat,), (0.5, 0.5), NO_COMM_2, alph)
    with pytest.raises(ValueError):
        LocalModel((strat,), (0.7,), NO_COMM_2, alph)
    with pytest.raises(ValueError):
        LocalModel((strat, strat), (1.5, -0.5), NO_COMM_2, alph)
    with pytest.raises(ValueError):
        LocalModel(
            (strat,), (1.0,), NO_COMM_2, alph, exact_weights=(Fraction(1, 2),)
        )


def test_hand_built_singlet_model_matches_quantum(singlet_pauli_table):
    model = singlet_pauli_lhv()
    assert len(model.strategies) == 8
    assert model.topology.budget == 0
    got = model_table(model, exact=True)
    for profile in singlet_pauli_table.profiles():
        for i in range(4):
            out = index_outcomes(i, 2)
            assert abs(
                got.prob(profile, out) - singlet_pauli_table.prob(profile, out)
            ) < 1e-12


def test_model_table_exact_needs_exact_weights():
    strat = enumerate_strategies(2, (3, 3), NO_COMM_2)[0]
    model = LocalModel(
        (strat,), (1.0,), NO_COMM_2, (PAULI_ALPHABET, PAULI_ALPHABET)
    )
    with pytest.raises(ValueError):
        model_table(model, exact=True)


# ---------------------------------------------------------------------------
# LP search


def max_table_error(a: CorrelationTable, b: CorrelationTable) -> float:
    return float(np.max(np.abs(table_vector(a) - table_vector(b))))


def test_find_singlet_model_without_communication(singlet_pauli_table):
    model = find_local_model(singlet_pauli_table, NO_COMM_2)
    assert isinstance(model, LocalModel)
    assert model.exact_weights is not None
    got = model_table(model, exact=True)
    # exact weights give clean dyadic entries; the only residue left is
    # the float dust in the quantum table itself
    assert max_table_error(got, singlet_pauli_table) < 1e-12
    assert got.prob((Z, Z), (1, -1)) == 0.5


def test_find_singlet_model_deduped(singlet_pauli_table):
    model = find_local_model(singlet_pauli_table, NO_COMM_2, dedupe_tables=True)
    assert isinstance(model, LocalModel)
    assert max_table_error(model_table(model), singlet_pauli_table) <= 1e-9


def test_ghz_needs_communication(ghz_pauli_table):
    verdict = find_local_model(ghz_pauli_table, NO_COMM_3)
    assert isinstance(verdict, Infeasible)
    assert verdict.violation > 1e-9
    # re-verify the certificate against every strategy column
    y, bound = verdict.coefficients, verdict.bound
    worst = math.inf
    for strat in enumerate_strategies(3, (3, 3, 3), NO_COMM_3):
        table = strategy_table(strat, NO_COMM_3, (PAULI_ALPHABET,) * 3)
        worst = min(worst, float(y @ table_vector(table)))
    assert worst >= bound - 1e-9
    assert float(y @ table_vector(ghz_pauli_table)) <= bound - verdict.violation + 1e-9


def test_one_bit_restores_ghz(ghz_pauli_table, ghz_bit_model):
    assert ghz_bit_model.topology.budget == 1
    if ghz_bit_model.exact_weights is not None:
        got = model_table(ghz_bit_model, exact=True)
    else:
        got = model_table(ghz_bit_model)
    assert max_table_error(got, ghz_pauli_table) <= 1e-9


# ---------------------------------------------------------------------------
# Shot-by-shot execution


def test_simulate_singlet_model():
    report = simulate_model(singlet_pauli_lhv(), 100_000, seed=11)
    assert report.bits_used_per_shot == 0
    table = report.empirical
    for a in PAULI_ALPHABET:
        assert abs(correlator(table, (a, a)) + 1.0) < 1e-12
    for a, b in itertools.product(PAULI_ALPHABET, repeat=2):
        if a != b:
            assert abs(correlator(table, (a, b))) < 0.05


def test_simulate_model_is_seed_deterministic():
    a = simulate_model(singlet_pauli_lhv(), 2000, seed=3)
    b = simulate_model(singlet_pauli_lhv(), 2000, seed=3)
    assert max_table_error(a.empirical, b.empirical) == 0.0


def test_simulate_ghz_bit_model_reproduces_mermin(ghz_bit_model):
    report = simulate_model(ghz_bit_model, 100_000, seed=19)
    assert report.bits_used_per_shot == 1
    got = mermin_correlators(report.empirical)
    assert np.allclose(got, (1.0, -1.0, -1.0, -1.0), atol=1e-12)


def test_simulate_model_needs_enough_shots():
    with pytest.raises(ValueError):
        simulate_model(singlet_pauli_lhv(), 0, seed=0)
    with pytest.raises(ValueError):
        # nine profiles cannot all be hit by one shot
        simulate_model(singlet_pauli_lhv(), 1, seed=0)
