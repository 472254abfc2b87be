"""
Tests de l'oracle des stratégies déterministes.

Couvre l'évaluation exacte des RAC standard et binaire, la recherche
exhaustive (décodage identité et recherche jointe), la meilleure réponse
binaire et l'inégalité de causalité informationnelle.

Example:
    $ pytest tests/test_strategy_oracle.py -v
"""

import math
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest

from brac_witness.exceptions import CapExceeded, DimensionMismatch
from brac_witness.models.payoff import PayoffConfig
from brac_witness.models.strategy import (
    BinaryDecodingTable,
    EncodingStrategy,
    SearchMode,
    StandardDecoding,
)
from brac_witness.models.task import DitString, TaskParams
from brac_witness.services.bounds_service import bounds_service
from brac_witness.services.combinatorics_service import combinatorics_service
from brac_witness.services.strategy_oracle_service import StrategyOracleService, strategy_oracle_service

oracle = strategy_oracle_service


# ==============================================================================
# RAC STANDARD : ÉVALUATION
# ==============================================================================

def test_evaluate_first_letter_encoding():
    params = TaskParams(d=2, n=2)
    value = oracle.evaluate_standard_strategy(EncodingStrategy.letter(params, 0), StandardDecoding.identity(params), params)
    assert value == Fraction(3, 4)


@pytest.mark.parametrize("d, n", [(2, 2), (3, 2), (4, 3), (5, 1)])
def test_evaluate_constant_encoding_is_one_over_d(d, n):
    params = TaskParams(d=d, n=n)
    value = oracle.evaluate_standard_strategy(EncodingStrategy.constant(params), StandardDecoding.identity(params), params)
    assert value == Fraction(1, d)


def test_evaluate_majority_d3():
    params = TaskParams(d=3, n=2)
    value = oracle.evaluate_standard_strategy(oracle.majority_strategy(params), StandardDecoding.identity(params), params)
    assert value == Fraction(2, 3)


def test_evaluate_dimension_mismatch():
    params = TaskParams(d=3, n=2)
    other = TaskParams(d=2, n=2)
    with pytest.raises(DimensionMismatch):
        oracle.evaluate_standard_strategy(EncodingStrategy.constant(other), StandardDecoding.identity(params), params)


# ==============================================================================
# ENCODAGE MAJORITAIRE
# ==============================================================================

def test_majority_encoding_examples():
    assert oracle.majority_encoding(DitString(letters=(0, 1, 1), d=2)) == 1
    assert oracle.majority_encoding(DitString(letters=(2, 2, 0, 0), d=3)) == 0
    assert oracle.majority_encoding(DitString(letters=(7,), d=8)) == 7


def test_majority_strategy_matches_per_word_rule():
    params = TaskParams(d=4, n=3)
    strategy = oracle.majority_strategy(params)
    for word in combinatorics_service.enumerate_words(params):
        dit_string = DitString(letters=tuple(int(v) for v in word), d=4)
        assert strategy.message_for(dit_string) == oracle.majority_encoding(dit_string)


def test_optimal_encoding_for_identity_is_majority():
    params = TaskParams(d=3, n=3)
    assert oracle.optimal_encoding_for_decoding(StandardDecoding.identity(params), params) == oracle.majority_strategy(params)


def test_optimal_encoding_for_relabelled_decoding():
    params = TaskParams(d=3, n=2)
    # Bob inverse les lettres 0 et 1 pour y = 0
    decoding = StandardDecoding(d=3, maps=((1, 0, 2), (0, 1, 2)))
    encoding = oracle.optimal_encoding_for_decoding(decoding, params)
    value = oracle.evaluate_standard_strategy(encoding, decoding, params)
    assert value == Fraction(2, 3)


# ==============================================================================
# RAC STANDARD : RECHERCHE EXHAUSTIVE
# ==============================================================================

def test_brute_force_identity_small():
    assert oracle.brute_force_standard(TaskParams(d=2, n=2), SearchMode.IDENTITY).value == Fraction(3, 4)
    result = oracle.brute_force_standard(TaskParams(d=3, n=2), SearchMode.IDENTITY, literal=True)
    assert result.value == Fraction(2, 3)
    assert result.evaluated == 3**9


@pytest.mark.parametrize("n, d", [(3, 2), (4, 2), (3, 3), (2, 5)])
def test_brute_force_identity_equals_enumeration_bound(n, d):
    params = TaskParams(d=d, n=n)
    result = oracle.brute_force_standard(params, SearchMode.IDENTITY)
    assert result.value == combinatorics_service.standard_rac_classical_value(params)
    value = oracle.evaluate_standard_strategy(oracle.majority_strategy(params), StandardDecoding.identity(params), params)
    assert value == result.value


@pytest.mark.parametrize("n, d", [(3, 2), (4, 2)])
def test_literal_enumeration_matches_separable_search(n, d):
    params = TaskParams(d=d, n=n)
    literal = oracle.brute_force_standard(params, SearchMode.IDENTITY, literal=True)
    separable = oracle.brute_force_standard(params, SearchMode.IDENTITY)
    assert literal.value == separable.value
    assert literal.witness == separable.witness


@pytest.mark.parametrize("n, d", [(2, 2), (3, 2)])
def test_joint_search_equals_identity_search(n, d):
    params = TaskParams(d=d, n=n)
    joint = oracle.brute_force_standard(params, SearchMode.JOINT, literal=True)
    identity = oracle.brute_force_standard(params, SearchMode.IDENTITY, literal=True)
    assert joint.value == identity.value == Fraction(3, 4)


def test_brute_force_caps():
    with pytest.raises(CapExceeded):
        oracle.brute_force_standard(TaskParams(d=3, n=3), SearchMode.IDENTITY, literal=True)
    with pytest.raises(CapExceeded):
        oracle.brute_force_standard(TaskParams(d=3, n=3), SearchMode.JOINT)
    with pytest.raises(CapExceeded):
        StrategyOracleService(encoding_cap=100).brute_force_binary(TaskParams(d=2, n=3), PayoffConfig(t_yes=Decimal(1), d=2))


def test_no_encoding_beats_bound_randomized():
    params = TaskParams(d=3, n=2)
    bound = combinatorics_service.standard_rac_classical_value(params)
    identity = StandardDecoding.identity(params)
    rng = np.random.default_rng(11)
    for _ in range(1000):
        table = tuple(int(m) for m in rng.integers(0, 3, size=9))
        assert oracle.evaluate_standard_strategy(EncodingStrategy(d=3, n=2, table=table), identity, params) <= bound


# ==============================================================================
# RAC BINAIRE
# ==============================================================================

def test_best_response_majority_answers_yes_on_message():
    for d in (2, 3, 4):
        params = TaskParams(d=d, n=2)
        cfg = PayoffConfig(t_yes=Decimal(d - 1), d=d)
        decoding = oracle.best_response_binary_decoding(oracle.majority_strategy(params), cfg, params)
        assert decoding.unreachable == ()
        for m in range(d):
            for y in range(2):
                assert decoding.guesses[m][y][m] == 0


def test_best_response_constant_encoding_tie_is_yes():
    params = TaskParams(d=3, n=2)
    cfg = PayoffConfig(t_yes=Decimal(2), d=3)
    decoding = oracle.best_response_binary_decoding(EncodingStrategy.constant(params), cfg, params)
    # 2 * (1/3) = 2/3 : égalité résolue en OUI
    assert all(g == 0 for per_y in decoding.guesses[0] for g in per_y)
    assert decoding.unreachable == (1, 2)
    assert all(g == 1 for m in (1, 2) for per_y in decoding.guesses[m] for g in per_y)


def test_best_response_letter_encoding():
    params = TaskParams(d=3, n=2)
    cfg = PayoffConfig(t_yes=Decimal(2), d=3)
    decoding = oracle.best_response_binary_decoding(EncodingStrategy.letter(params, 0), cfg, params)
    for m in range(3):
        assert decoding.guesses[m][0][m] == 0


@pytest.mark.parametrize("n", [2, 3])
def test_binary_d2_majority_reduces_to_standard(n):
    params = TaskParams(d=2, n=n)
    cfg = PayoffConfig(t_yes=Decimal(1), d=2)
    majority = oracle.majority_strategy(params)
    decoding = oracle.best_response_binary_decoding(majority, cfg, params)
    assert oracle.evaluate_binary_strategy(majority, decoding, cfg, params) == Fraction(3, 4)
    assert oracle.brute_force_binary(params, cfg).value == oracle.brute_force_standard(params).value


def test_binary_d2_letter_forwarding_beats_majority_off_balance():
    params = TaskParams(d=2, n=2)
    for t_yes, expected in ((Decimal(3), Fraction(7, 8)), (Decimal("0.5"), Fraction(5, 6))):
        cfg = PayoffConfig(t_yes=t_yes, d=2)
        result = oracle.brute_force_binary(params, cfg)
        assert result.value == expected
        letter = EncodingStrategy.letter(params, 0)
        assert oracle.evaluate_binary_strategy(letter, oracle.best_response_binary_decoding(letter, cfg, params), cfg, params) == expected


def test_binary_majority_d3():
    params = TaskParams(d=3, n=2)
    cfg = PayoffConfig(t_yes=Decimal(2), d=3)
    majority = oracle.majority_strategy(params)
    decoding = oracle.best_response_binary_decoding(majority, cfg, params)
    assert oracle.evaluate_binary_strategy(majority, decoding, cfg, params) == Fraction(3, 4)


def test_always_no_payoff():
    for d, t_yes in ((2, "1"), (3, "2"), (4, "1.5")):
        params = TaskParams(d=d, n=2)
        cfg = PayoffConfig(t_yes=Decimal(t_yes), d=d)
        value = oracle.evaluate_binary_strategy(
            EncodingStrategy.constant(params), BinaryDecodingTable.constant(params, 1), cfg, params
        )
        assert value == Fraction(d - 1) / cfg.t_d
    assert Fraction(1, 2) == oracle.evaluate_binary_strategy(
        EncodingStrategy.constant(TaskParams(d=2, n=2)),
        BinaryDecodingTable.constant(TaskParams(d=2, n=2), 1),
        PayoffConfig(t_yes=Decimal(1), d=2),
        TaskParams(d=2, n=2),
    )


def test_best_response_never_worse_than_random_tables():
    params = TaskParams(d=3, n=2)
    cfg = PayoffConfig(t_yes=Decimal("1.9994"), d=3)
    rng = np.random.default_rng(5)
    for _ in range(200):
        encoding = EncodingStrategy(d=3, n=2, table=tuple(int(m) for m in rng.integers(0, 3, size=9)))
        best = oracle.evaluate_binary_strategy(encoding, oracle.best_response_binary_decoding(encoding, cfg, params), cfg, params)
        guesses = rng.integers(0, 2, size=(3, 2, 3))
        table = BinaryDecodingTable(d=3, n=2, guesses=tuple(tuple(tuple(int(g) for g in row) for row in per_m) for per_m in guesses))
        assert oracle.evaluate_binary_strategy(encoding, table, cfg, params) <= best


def test_majority_matches_closed_form_d3():
    params = TaskParams(d=3, n=2)
    cfg = PayoffConfig(t_yes=Decimal("1.99940"), d=3)
    majority = oracle.majority_strategy(params)
    majority_value = oracle.evaluate_binary_strategy(
        majority, oracle.best_response_binary_decoding(majority, cfg, params), cfg, params
    )
    assert majority_value == bounds_service.binary_classical_n2(3, cfg)

    result = oracle.brute_force_binary(params, cfg)
    assert result.evaluated == 3**9
    assert result.value == oracle.evaluate_binary_strategy(result.witness, result.binary_decoding, cfg, params)
    # Transmettre a_0 fait déjà mieux que la majorité sous t_yes = 2
    letter = EncodingStrategy.letter(params, 0)
    letter_value = oracle.evaluate_binary_strategy(letter, oracle.best_response_binary_decoding(letter, cfg, params), cfg, params)
    assert letter_value > majority_value
    assert result.value >= letter_value


def test_grouped_encoding_beats_closed_form_d3():
    params = TaskParams(d=3, n=2)
    cfg = PayoffConfig(t_yes=Decimal(2), d=3)
    # 00, 01, 10, 11 -> 0 ; 02, 12, 22 -> 1 ; 20, 21 -> 2
    encoding = EncodingStrategy(d=3, n=2, table=(0, 0, 1, 0, 0, 1, 2, 2, 1))
    value = oracle.evaluate_binary_strategy(encoding, oracle.best_response_binary_decoding(encoding, cfg, params), cfg, params)
    assert value == Fraction(7, 9)
    assert bounds_service.binary_classical_n2(3, cfg) == Fraction(3, 4)
    assert oracle.brute_force_binary(params, cfg).value >= value


def test_brute_force_binary_small_instances():
    cfg = PayoffConfig(t_yes=Decimal(1), d=2)
    assert oracle.brute_force_binary(TaskParams(d=2, n=2), cfg).value == Fraction(3, 4)
    assert oracle.brute_force_binary(TaskParams(d=2, n=3), cfg).value == Fraction(3, 4)


def test_brute_force_binary_huge_payoff_uses_exact_integers():
    params = TaskParams(d=2, n=2)
    cfg = PayoffConfig.from_p_crit("0.5000000000000000000001", 2)
    t_yes = cfg.t_yes_exact
    result = oracle.brute_force_binary(params, cfg)
    # t_yes juste sous 1 : transmettre une lettre est optimal
    assert result.value == (4 * t_yes + 8) / (8 * (t_yes + 1))


# ==============================================================================
# CAUSALITÉ INFORMATIONNELLE
# ==============================================================================

def test_information_causality_examples():
    params = TaskParams(d=2, n=2)
    assert oracle.information_causality_lhs(EncodingStrategy.constant(params), params) == pytest.approx(0.0, abs=1e-12)
    assert oracle.information_causality_lhs(EncodingStrategy.letter(params, 0), params) == pytest.approx(1.0, abs=1e-12)
    majority = oracle.information_causality_lhs(oracle.majority_strategy(params), params)
    assert 0 < majority <= 1 + 1e-9


def test_information_causality_bounded_by_capacity_randomized():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(1, 4))
        params = TaskParams(d=d, n=n)
        table = tuple(int(m) for m in rng.integers(0, d, size=d**n))
        lhs = oracle.information_causality_lhs(EncodingStrategy(d=d, n=n, table=table), params)
        assert lhs <= math.log2(d) + 1e-9


# ==============================================================================
# EXPORT DES STATISTIQUES
# ==============================================================================

def test_strategy_statistics_cover_all_triples():
    params = TaskParams(d=3, n=2)
    cfg = PayoffConfig(t_yes=Decimal(2), d=3)
    majority = oracle.majority_strategy(params)
    table = oracle.strategy_statistics(majority, oracle.best_response_binary_decoding(majority, cfg, params), cfg, params)
    assert len(table.entries) == 2 * 9 * 3
    assert all(e.p0 + e.p1 == 1.0 for e in table.entries)
