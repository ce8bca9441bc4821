import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betatet import (
    BudgetExhausted,
    CompositionTerm,
    NonFinite,
    ShortCircuit,
    compose_adaptive,
    compose_finite,
)
from betatet.beta import QFamily

LOG2 = math.log(2.0)


def const_term(j, value):
    return CompositionTerm(index=j, evaluator=lambda s, z, v=value: v)


class ConstFamily:
    def __init__(self, value):
        self.value = value

    def __call__(self, j):
        return const_term(j, self.value)


def test_constant_maps_compose_to_value():
    terms = [const_term(j, 0.7 + 0.2j) for j in range(1, 6)]
    assert compose_finite(terms, s=3.0, z0=5.0) == 0.7 + 0.2j


def test_single_term_value():
    # one term at s=0, z0=0: e^0 / (e^{log2 * 1} + 1) = 1/3
    fam = QFamily(LOG2)
    val = compose_finite([fam(1)], s=0.0, z0=0.0)
    assert abs(val - 1.0 / 3.0) < 1e-15


def test_deep_composition_vanishes_far_left():
    fam = QFamily(LOG2)
    terms = [fam(j) for j in range(1, 101)]
    assert abs(compose_finite(terms, s=-40.0, z0=0.0)) < 1e-12


def test_nesting_order_exact():
    fam = QFamily(LOG2)
    terms = [fam(j) for j in range(1, 31)]
    for s in (0.0, -2.0, 1.5 + 0.5j):
        inner = compose_finite(terms[1:], s, 0.0)
        assert compose_finite(terms, s, 0.0) == terms[0].evaluator(s, inner)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=2, max_value=12),
    st.complex_numbers(min_magnitude=0, max_magnitude=3, allow_nan=False, allow_infinity=False),
)
def test_nesting_order_property(n, s):
    fam = QFamily(1.0)
    terms = [fam(j) for j in range(1, n + 1)]
    try:
        whole = compose_finite(terms, s, 0.0)
        tail = compose_finite(terms[1:], s, 0.0)
    except (ShortCircuit, Exception):
        return
    assert whole == terms[0].evaluator(s, tail)


def test_determinism():
    fam = QFamily(0.5 + 3j)
    terms = [fam(j) for j in range(1, 101)]
    a = compose_finite(terms, 0.3 - 0.7j, 0.0)
    b = compose_finite(terms, 0.3 - 0.7j, 0.0)
    assert a == b


def test_adaptive_q_family_tail():
    fam = QFamily(LOG2)
    res = compose_adaptive(fam, s=0.0, z0=0.0, tail_tolerance=1e-14, max_terms=512)
    assert res.terms_used <= 60
    assert res.tail_estimate < 1e-14
    assert not res.short_circuited
    # oracle: direct summation of the neglected terms must sit under the bound
    with np.errstate(over="ignore"):
        direct = sum(
            abs(1.0 / (np.exp(LOG2 * j) + 1.0))
            for j in range(res.terms_used + 1, res.terms_used + 4000)
        )
    assert direct <= res.tail_estimate
    # value matches a much deeper finite composition
    deep = compose_finite([fam(j) for j in range(1, 201)], 0.0, 0.0)
    assert abs(res.value - deep) < 1e-13


def test_adaptive_constant_family():
    fam = ConstFamily(0.25 + 0j)
    res = compose_adaptive(fam, s=0.0, z0=0.0, tail_tolerance=1e-14, max_terms=10,
                           attracting=0.25)
    assert res.terms_used == 1
    assert res.tail_estimate == 0.0
    assert res.value == 0.25 + 0j


def test_adaptive_budget_exhausted():
    fam = QFamily(LOG2)
    with pytest.raises(BudgetExhausted) as exc:
        compose_adaptive(fam, s=0.0, z0=0.0, tail_tolerance=1e-14, max_terms=2)
    res = exc.value.result
    assert res.terms_used == 2
    assert np.isfinite(res.value.real) and np.isfinite(res.value.imag)
    assert res.tail_estimate > 1e-14


def test_overflow_short_circuit():
    terms = [QFamily(LOG2)(1), const_term(2, 800.0 + 0j)]
    with pytest.raises(ShortCircuit) as exc:
        compose_finite(terms, s=0.0, z0=0.0)
    assert exc.value.last_value == 800.0 + 0j


def test_nan_term_raises():
    terms = [const_term(1, complex("nan"))]
    with pytest.raises(NonFinite):
        compose_finite(terms, s=0.0, z0=0.0)


def test_empty_terms_rejected():
    with pytest.raises(ValueError):
        compose_finite([], 0.0, 0.0)


def test_term_index_validated():
    with pytest.raises(ValueError):
        CompositionTerm(index=0, evaluator=lambda s, z: z)
