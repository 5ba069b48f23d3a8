"""Guard the frozen reference values against drift in the derivation chain."""

import pytest

import oracle_reference as oracle


def test_frozen_values_match_rederivation():
    derived = oracle.derive_all()
    assert derived.keys() == oracle.FROZEN.keys()
    for key, value in derived.items():
        assert value == pytest.approx(oracle.FROZEN[key], rel=1e-12, abs=1e-300), key


def test_rational_and_product_forms_agree():
    for c in (1e-9, 0.3, 2.2507508933615497, 6.8, 150.0):
        for m in (1, 4, 17, 60):
            a = oracle.b1_exact_rational(0.1, m, c)
            b = oracle.b1_product_form(0.1, m, c)
            assert a == pytest.approx(b, rel=1e-12)
