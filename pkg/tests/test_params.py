import numpy as np
import pytest

from laneemden.errors import DomainError
from laneemden.params import (CASE_BORDER, CASE_SUB, CASE_SUPER, ProblemParams,
                              check_condition_P, critical_exponent,
                              p_threshold, parse_exponent, scaling_exponents)


def test_critical_exponent_examples():
    assert critical_exponent(4, 3.0) == pytest.approx(3.0, abs=1e-14)
    # solve 1/3.5 + 1/(q+1) = 1/2 by hand: q = 11/3
    assert critical_exponent(4, 2.5) == pytest.approx(11.0 / 3.0, abs=1e-12)
    assert critical_exponent(5, 7.0 / 3.0) == pytest.approx(7.0 / 3.0, abs=1e-12)


def test_critical_exponent_domain_error():
    with pytest.raises(DomainError):
        critical_exponent(4, 1.0)  # (n-2)/n = 1/(p+1): no positive partner
    with pytest.raises(DomainError):
        critical_exponent(2, 3.0)


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_hyperbola_residual_invariant(n):
    top = (n + 2.0) / (n - 2.0)
    for p in np.linspace(1.05, top, 40):
        pp = ProblemParams(n=n, p=float(p))
        resid = abs(1 / (pp.p + 1) + 1 / (pp.q + 1) - (n - 2) / n)
        assert resid < 1e-12
        s = scaling_exponents(pp)
        assert s["su"] + s["sv"] == pytest.approx(n - 2.0, abs=1e-12)


def test_scaling_exponents_examples():
    s = scaling_exponents(ProblemParams(n=4, p=3.0))
    assert s["su"] == pytest.approx(1.0) and s["sv"] == pytest.approx(1.0)
    s = scaling_exponents(ProblemParams(n=4, p=2.5))
    assert s["su"] == pytest.approx(6.0 / 7.0, abs=1e-12)
    assert s["sv"] == pytest.approx(8.0 / 7.0, abs=1e-12)


def test_condition_P_examples():
    label, _ = check_condition_P(ProblemParams(n=4, p=2.5))
    assert label == "case_i"
    label, p4 = check_condition_P(ProblemParams(n=4, p=1.9))
    assert label == "case_ii"
    assert p4 == pytest.approx((9 + np.sqrt(33)) / 8, abs=1e-12)
    label, _ = check_condition_P(ProblemParams(n=4, p=1.5))
    assert label == "outside"


def test_condition_P_partition():
    n = 4
    pn = p_threshold(n)
    border = n / (n - 2.0)
    top = (n + 2.0) / (n - 2.0)
    prev = "outside"
    for p in np.linspace(1.02, top - 1e-9, 300):
        label, _ = check_condition_P(ProblemParams(n=n, p=float(p)))
        if p < pn:
            assert label == "outside"
        elif pn < p < border:
            assert label == "case_ii"
        elif border < p < top:
            assert label == "case_i"
        # labels change monotonically: outside -> case_ii -> case_i
        order = {"outside": 0, "case_ii": 1, "case_i": 2}
        assert order[label] >= order[prev] or label == prev
        prev = label


def test_case_tags():
    assert ProblemParams(n=4, p=2.5).case_tag == CASE_SUPER
    assert ProblemParams(n=4, p=1.9).case_tag == CASE_SUB
    assert ProblemParams(n=4, p=2.0).case_tag == CASE_BORDER


def test_q_always_derived():
    pp = ProblemParams(n=4, p=2.5)
    assert pp.q == critical_exponent(4, 2.5)
    with pytest.raises(TypeError):
        ProblemParams(n=4, p=2.5, q=3.0)  # q is not an input


def test_rejects_bad_inputs():
    with pytest.raises(DomainError):
        ProblemParams(n=3, p=3.0)
    with pytest.raises(DomainError):
        ProblemParams(n=4, p=0.9)
    with pytest.raises(DomainError):
        ProblemParams(n=4, p=3.2)
    with pytest.raises(DomainError):
        ProblemParams(n=4, p=3.0, alpha=-1.0)


def test_parse_exponent():
    assert parse_exponent("11/3") == pytest.approx(11.0 / 3.0, abs=1e-16)
    assert parse_exponent("2.5") == 2.5
    assert parse_exponent(3) == 3.0


def test_perturbed_exponents():
    pp = ProblemParams(n=4, p=3.0, alpha=2.0, beta=0.5, epsilon=0.01)
    assert pp.p_eps == pytest.approx(3.02)
    assert pp.q_eps == pytest.approx(3.005)
