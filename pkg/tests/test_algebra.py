from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmkisin.algebra import (
    INF,
    PrecisionExhausted,
    TruncSeries,
    default_precision,
    frobenius_sigma,
    is_irreducible,
    is_prime,
    make_field,
    require_valuation,
    valuation,
)


def _brute_irreducible(poly, p):
    # a degree <= 3 polynomial is irreducible iff it has no root; degree 4 also needs no quadratic factor
    deg = len(poly) - 1
    if any(sum(c * x**i for i, c in enumerate(poly)) % p == 0 for x in range(p)):
        return False
    if deg < 4:
        return True
    for a, b in product(range(p), repeat=2):
        q = [b, a, 1]
        r = list(poly)
        for k in range(len(r) - 3, -1, -1):
            c = r[k + 2]
            for i in range(3):
                r[k + i] = (r[k + i] - c * q[i]) % p
        if not any(r[:2]):
            return False
    return True


def test_prime_field_modulus_is_trivial():
    F = make_field(2, 1)
    assert F.q == 2 and F.is_prime
    assert make_field(5).q == 5


def test_gf4_modulus():
    assert make_field(2, 2).modulus == (1, 1, 1)


@pytest.mark.parametrize("p,f", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (3, 4)])
def test_modulus_is_first_irreducible_in_lex_order(p, f):
    F = make_field(p, f)
    code = sum(c * p**i for i, c in enumerate(F.modulus[:-1]))
    assert _brute_irreducible(list(F.modulus), p)
    for smaller in range(code):
        low = [(smaller // p**i) % p for i in range(f)]
        assert not _brute_irreducible(low + [1], p)


def test_irreducibility_agrees_with_root_test_for_cubics():
    for low in product(range(3), repeat=3):
        poly = list(low) + [1]
        assert is_irreducible(poly, 3) == _brute_irreducible(poly, 3)


def test_make_field_rejects_composite():
    with pytest.raises(ValueError):
        make_field(4)
    with pytest.raises(ValueError):
        make_field(3, 0)


@pytest.mark.parametrize("p,f", [(2, 2), (3, 2), (2, 3), (5, 2)])
def test_field_axioms(p, f):
    F = make_field(p, f)
    els = list(F.elements())
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        assert F.frob(a, f) == a
        assert F.frob_inv(F.frob(a)) == a
    for a, b in product(els[:7], repeat=2):
        for c in els[:5]:
            assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.frob(F.mul(a, b)) == F.mul(F.frob(a), F.frob(b))
        assert F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))


def test_prime_subfield_is_fixed_by_frobenius():
    F = make_field(3, 2)
    fixed = [a for a in F.elements() if F.frob(a) == a]
    assert fixed == [0, 1, 2]


def test_is_prime_small():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_sigma_squares_in_characteristic_two():
    F = make_field(2)
    s = TruncSeries(F, 10, (0, 1, 1))
    assert frobenius_sigma(s).coeffs == (0, 0, 1, 0, 1)


def test_sigma_of_scalar_multiple_of_u():
    F = make_field(5)
    s = TruncSeries.monomial(F, 1, 20, coeff=3)
    assert frobenius_sigma(s) == TruncSeries.monomial(F, 5, 20, coeff=3)


def test_sigma_f_times_is_q_frobenius():
    F = make_field(2, 2)
    u = TruncSeries.monomial(F, 1, 10)
    assert frobenius_sigma(u, 2) == TruncSeries.monomial(F, 4, 10)
    c = TruncSeries(F, 10, (2,))
    assert frobenius_sigma(c, 2) == c
    assert frobenius_sigma(c, 1).coeffs == (F.frob(2),)


def test_valuation_examples():
    F = make_field(2)
    assert valuation(TruncSeries.zero(F, 40)) == INF
    assert valuation(TruncSeries(F, 40, tuple([1] + [0] * 7 + [1]))) == 0
    assert valuation(TruncSeries.monomial(F, 16, 40)) == 16


def test_require_valuation_raises_on_vanishing_series():
    F = make_field(3)
    with pytest.raises(PrecisionExhausted):
        require_valuation(TruncSeries.zero(F, 5))
    assert require_valuation(TruncSeries.monomial(F, 2, 5)) == 2


def test_coefficient_past_precision_raises():
    s = TruncSeries(make_field(2), 4, (1, 1))
    assert s.coefficient(3) == 0
    with pytest.raises(PrecisionExhausted):
        s.coefficient(4)


def test_truncation_drops_high_terms():
    s = TruncSeries(make_field(3), 3, (1, 2, 0, 1, 1))
    assert s.coeffs == (1, 2)


def test_shift_and_division():
    F = make_field(5)
    s = TruncSeries(F, 6, (0, 0, 1, 4))
    assert s.shift(2).coeffs == (0, 0, 0, 0, 1, 4)
    d = s.shift(-2)
    assert d.coeffs == (1, 4) and d.precision == 4
    with pytest.raises(ValueError):
        s.shift(-3)


def test_inverse_of_unit():
    F = make_field(7)
    s = TruncSeries(F, 12, (3, 1, 4, 1, 5))
    assert (s * s.inverse()) == TruncSeries.one(F, 12)
    with pytest.raises(ZeroDivisionError):
        TruncSeries(F, 5, (0, 1)).inverse()


def test_inverse_over_extension():
    F = make_field(2, 3)
    s = TruncSeries(F, 9, (5, 3, 0, 7))
    assert s * s.inverse() == TruncSeries.one(F, 9)


def test_mixed_fields_rejected():
    a = TruncSeries(make_field(2), 4, (1,))
    b = TruncSeries(make_field(3), 4, (1,))
    with pytest.raises(ValueError):
        a + b


def test_json_round_trip():
    F = make_field(3, 2)
    s = TruncSeries(F, 7, (0, 5, 8, 1))
    assert TruncSeries.from_json(s.to_json()) == s


def test_default_precision():
    assert default_precision(16) == 33


def _series(p, f=1):
    q = p**f
    return st.builds(
        lambda cs, n: TruncSeries(make_field(p, f), n, tuple(cs)),
        st.lists(st.integers(0, q - 1), max_size=12),
        st.integers(4, 30),
    )


FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)]


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_valuation_is_additive(data):
    p, f = data.draw(st.sampled_from(FIELDS))
    a = data.draw(_series(p, f))
    b = data.draw(_series(p, f))
    n = min(a.precision, b.precision)
    va, vb = a.valuation(), b.valuation()
    if va != INF and vb != INF and va + vb < n:
        assert (a * b).valuation() == va + vb


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_sigma_is_ring_homomorphism(data):
    p, f = data.draw(st.sampled_from(FIELDS))
    a = data.draw(_series(p, f))
    b = data.draw(_series(p, f))
    assert frobenius_sigma(a + b).agrees_with(frobenius_sigma(a) + frobenius_sigma(b))
    assert frobenius_sigma(a * b).agrees_with(frobenius_sigma(a) * frobenius_sigma(b))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_sigma_scales_valuation_by_p(data):
    p, f = data.draw(st.sampled_from(FIELDS))
    a = data.draw(_series(p, f))
    v = a.valuation()
    if v != INF and p * v < a.precision:
        assert frobenius_sigma(a).valuation() == p * v


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_ring_axioms(data):
    p, f = data.draw(st.sampled_from(FIELDS))
    a, b, c = (data.draw(_series(p, f)) for _ in range(3))
    assert (a * (b + c)).agrees_with(a * b + a * c)
    assert (a * b).agrees_with(b * a)
    assert (a - a).is_zero()
