from __future__ import annotations


import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    ALL_MAPS,
    POOL,
    exhaustive_failures,
    p1,
    p2,
    p3,
    p4,
    p5,
    p6,
    p7,
    ref_compatible,
    ref_override,
    ref_restrict,
    ref_update,
    val,
)
from ntacomp.valuations import (
    IncompatibleValuations,
    Valuation,
    bool_var,
    clock,
    compatible,
    int_var,
    merge,
    override,
    restrict,
    time_shift,
    underride,
    update,
)


def as_dict(v: Valuation) -> dict:
    return dict(v.items())


partial = st.dictionaries(st.sampled_from("xyz"), st.integers(1, 3)).map(lambda d: val(**d))
names = st.sets(st.sampled_from("xyz"))

# -- examples --------------------------------------------------------------------


def test_override_examples():
    assert override(val(x=1), val(x=2, y=3)) == val(x=1, y=3)
    assert override(val(), val(x=2)) == val(x=2)
    assert override(val(y=3), val(x=2)) == val(x=2, y=3)
    assert underride(val(x=1), val(x=2, y=3)) == val(x=2, y=3)


def test_update_examples():
    assert update(val(x=1, y=2), val(y=3, z=1)) == val(x=1, y=3)
    assert update(val(x=1, y=2), val()) == val(x=1, y=2)
    f, g, h = val(x=1), val(x=2), val(x=3)
    assert update(update(f, g), h) == update(f, override(h, g)) == val(x=3)


def test_merge_examples():
    assert merge(val(x=1), val(y=2)) == val(x=1, y=2)
    assert merge(val(x=1), val(x=1, y=2)) == val(x=1, y=2)
    with pytest.raises(IncompatibleValuations):
        merge(val(x=1), val(x=2))


def test_restrict_examples():
    f = val(x=1, y=2)
    assert restrict(f, {"x"}) == val(x=1)
    assert restrict(f, set(f)) == f
    assert restrict(f, ()) == val()


def test_time_shift_examples():
    c = clock("c", 9)
    n = int_var("n", 0, 9)
    assert time_shift(Valuation({c: 2, n: 5}), 3) == Valuation({c: 5, n: 5})
    v = Valuation({c: 4, n: 1})
    assert time_shift(v, 0) == v
    top = clock("t", 4)
    sat = Valuation({top: 4})
    assert time_shift(sat, 2) == sat
    assert time_shift(Valuation({top: 3}), 5)["t"] == 4
    with pytest.raises(ValueError):
        time_shift(v, -1)


def test_entries_are_canonical():
    a = Valuation({POOL["y"]: 1, POOL["x"]: 2})
    b = Valuation({POOL["x"]: 2, POOL["y"]: 1})
    assert a == b and hash(a) == hash(b)
    assert list(a) == ["x", "y"]


def test_values_outside_domain_rejected():
    with pytest.raises(ValueError):
        val(x=4)
    with pytest.raises(ValueError):
        Valuation({bool_var("b"): 3})


# -- agreement with the dict reference ---------------------------------------------------


@settings(max_examples=1000)
@given(partial, partial, names)
def test_operators_match_reference(f, g, X):
    F, G = as_dict(f), as_dict(g)
    assert as_dict(override(f, g)) == ref_override(F, G)
    assert as_dict(update(f, g)) == ref_update(F, G)
    assert compatible(f, g) == ref_compatible(F, G)
    assert as_dict(restrict(f, X)) == ref_restrict(F, X)
    if ref_compatible(F, G):
        assert as_dict(merge(f, g)) == {**F, **G}


# -- the seven algebraic properties ---------------------------------------------------------


@settings(max_examples=1000)
@given(partial, partial)
def test_property_1(f, g):
    assert p1(f, g)


@settings(max_examples=1000)
@given(partial, partial, partial)
def test_property_2(f, g, h):
    assert p2(f, g, h)


@settings(max_examples=1000)
@given(partial, partial)
def test_property_3(f, g):
    assert p3(f, g)


@settings(max_examples=1000)
@given(partial, partial, partial)
def test_property_4(f, g, h):
    assert p4(f, g, h)


@settings(max_examples=1000)
@given(partial, partial, partial)
def test_property_5(f, g, h):
    assert p5(f, g, h)


@settings(max_examples=1000)
@given(partial, partial, names)
def test_property_6(f, g, X):
    assert p6(f, g, X)


@settings(max_examples=1000)
@given(partial, partial, partial)
def test_property_7(f, g, h):
    assert p7(f, g, h)


def test_properties_exhaustive():
    assert len(ALL_MAPS) == 64
    assert exhaustive_failures(ALL_MAPS, "xyz") == dict.fromkeys("1234567", 0)


def test_exhaustive_check_detects_a_wrong_operator():
    flipped = exhaustive_failures(ALL_MAPS, "xyz", override=lambda f, g: override(g, f))
    assert flipped["4"] > 0 and flipped["3"] > 0


# -- merge and time shift laws -------------------------------------------------------------


@settings(max_examples=500)
@given(partial, partial, partial)
def test_merge_commutative_associative(f, g, h):
    if compatible(f, g):
        assert merge(f, g) == merge(g, f)
    if compatible(f, g) and compatible(g, h) and compatible(f, h):
        assert merge(merge(f, g), h) == merge(f, merge(g, h))


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_time_shift_additive(x0, n, d1, d2):
    v = Valuation({clock("c", 5): min(x0, 5), int_var("n", 0, 6): n})
    assert time_shift(time_shift(v, d1), d2) == time_shift(v, d1 + d2)
    assert time_shift(v, d1)["n"] == n
