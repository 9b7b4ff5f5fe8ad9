import math

import pytest
from hypothesis import given, strategies as st

from dataspace import ns
from dataspace.units import DEFAULT_UNITS, Unit, UnitError, UnitTable, convert_unit


def test_resolve_known_symbols():
    assert DEFAULT_UNITS.resolve("mm").si_multiplier == 1e-3
    assert DEFAULT_UNITS.resolve("MPa").dimension == "stress"
    assert DEFAULT_UNITS.resolve("HBW").iri.value == ns.DSMS_UNIT + "HBW"
    assert DEFAULT_UNITS.resolve("wt.%").dimension == "mass-fraction"


def test_unknown_symbol_is_always_an_error():
    with pytest.raises(UnitError):
        DEFAULT_UNITS.resolve("furlong")
    with pytest.raises(UnitError):
        DEFAULT_UNITS.by_iri("http://example.org/NoSuchUnit")
    assert not DEFAULT_UNITS.known("furlong")


def test_unitless_aliases_share_an_iri():
    one = DEFAULT_UNITS.resolve("UnitOne")
    dash = DEFAULT_UNITS.resolve("-")
    assert one.iri == dash.iri
    assert DEFAULT_UNITS.by_iri(one.iri).dimension == "dimensionless"


def test_exact_decimal_scalings():
    mm, m = DEFAULT_UNITS.resolve("mm"), DEFAULT_UNITS.resolve("m")
    assert convert_unit(1.55, mm, m) == 0.00155
    mmps, mps = DEFAULT_UNITS.resolve("mm/s"), DEFAULT_UNITS.resolve("m/s")
    assert convert_unit(0.1, mmps, mps) == 1e-4
    kn, n = DEFAULT_UNITS.resolve("kN"), DEFAULT_UNITS.resolve("N")
    assert convert_unit(2.5, kn, n) == 2500.0


def test_offset_conversions():
    c, k = DEFAULT_UNITS.resolve("°C"), DEFAULT_UNITS.resolve("K")
    assert convert_unit(22.0, c, k) == 295.15
    assert convert_unit(295.15, k, c) == pytest.approx(22.0, abs=1e-12)
    assert convert_unit(0.0, c, k) == 273.15


def test_incompatible_dimensions_raise():
    with pytest.raises(UnitError):
        convert_unit(1.0, DEFAULT_UNITS.resolve("mm"), DEFAULT_UNITS.resolve("s"))
    with pytest.raises(UnitError):
        convert_unit(1.0, DEFAULT_UNITS.resolve("HBW"), DEFAULT_UNITS.resolve("MPa"))


def test_identity_conversion_is_exact():
    mpa = DEFAULT_UNITS.resolve("MPa")
    assert convert_unit(123.456, mpa, mpa) == 123.456


def test_nonpositive_multiplier_rejected():
    with pytest.raises(UnitError):
        Unit("bad", DEFAULT_UNITS.resolve("m").iri, 0.0)


def test_custom_table():
    table = UnitTable([DEFAULT_UNITS.resolve("m"), DEFAULT_UNITS.resolve("mm")])
    assert table.known("mm")
    assert not table.known("MPa")
    assert [u.symbol for u in table.units()] == ["m", "mm"]


_SCALED = ["m", "mm", "cm", "km", "µm"]


@given(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    st.sampled_from(_SCALED),
    st.sampled_from(_SCALED),
)
def test_round_trip_conversion_is_near_exact(value, a, b):
    ua, ub = DEFAULT_UNITS.resolve(a), DEFAULT_UNITS.resolve(b)
    there = convert_unit(value, ua, ub)
    back = convert_unit(there, ub, ua)
    assert math.isclose(back, value, rel_tol=1e-12, abs_tol=1e-300) or back == value


@given(st.floats(min_value=-1e9, max_value=1e9, allow_nan=False))
def test_conversion_agrees_with_si_formula(value):
    mm, km = DEFAULT_UNITS.resolve("mm"), DEFAULT_UNITS.resolve("km")
    assert convert_unit(value, mm, km) == pytest.approx(value * 1e-6, rel=1e-12)
