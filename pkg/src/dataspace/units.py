"""Unit table (QUDT-style IRIs, SI factors) and conversion.

The table is data, not code: symbols found in measurement files resolve to
Unit entries; unknown symbols are always an error so no unit is lost
silently.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ns
from .rdf import Iri


class UnitError(ValueError):
    pass


@dataclass(frozen=True)
class Unit:
    symbol: str
    iri: Iri
    si_multiplier: float
    si_offset: float = 0.0
    dimension: str = "dimensionless"

    def __post_init__(self):
        if self.si_multiplier <= 0:
            raise UnitError("si_multiplier must be positive")


def _u(symbol, local, mult, dim, offset=0.0, base=ns.QUDT_UNIT):
    return Unit(symbol, Iri(base + local), mult, offset, dim)


_UNITS = [
    _u("m", "M", 1.0, "length"),
    _u("mm", "MilliM", 1e-3, "length"),
    _u("cm", "CentiM", 1e-2, "length"),
    _u("km", "KiloM", 1e3, "length"),
    _u("µm", "MicroM", 1e-6, "length"),
    _u("m²", "M2", 1.0, "area"),
    _u("mm²", "MilliM2", 1e-6, "area"),
    _u("s", "SEC", 1.0, "time"),
    _u("min", "MIN", 60.0, "time"),
    _u("h", "HR", 3600.0, "time"),
    _u("1/s", "PER-SEC", 1.0, "frequency"),
    _u("m/s", "M-PER-SEC", 1.0, "speed"),
    _u("mm/s", "MilliM-PER-SEC", 1e-3, "speed"),
    _u("mm/min", "MilliM-PER-MIN", 1e-3 / 60.0, "speed"),
    _u("Pa", "PA", 1.0, "stress"),
    _u("kPa", "KiloPA", 1e3, "stress"),
    _u("MPa", "MegaPA", 1e6, "stress"),
    _u("GPa", "GigaPA", 1e9, "stress"),
    _u("N", "N", 1.0, "force"),
    _u("kN", "KiloN", 1e3, "force"),
    _u("K", "K", 1.0, "temperature"),
    _u("°C", "DEG_C", 1.0, "temperature", offset=273.15),
    _u("kg", "KiloGM", 1.0, "mass"),
    _u("g", "GM", 1e-3, "mass"),
    _u("%", "PERCENT", 1e-2, "dimensionless"),
    _u("wt.%", "WtPercent", 1e-2, "mass-fraction", base=ns.DSMS_UNIT),
    _u("HBW", "HBW", 1.0, "hardness", base=ns.DSMS_UNIT),
    _u("HV", "HV", 1.0, "hardness", base=ns.DSMS_UNIT),
    _u("UnitOne", "UNITLESS", 1.0, "dimensionless"),
    _u("-", "UNITLESS", 1.0, "dimensionless"),
]


class UnitTable:
    def __init__(self, units=_UNITS):
        self._by_symbol = {u.symbol: u for u in units}
        self._by_iri = {}
        for u in units:
            self._by_iri.setdefault(u.iri.value, u)

    def resolve(self, symbol: str) -> Unit:
        unit = self._by_symbol.get(symbol)
        if unit is None:
            raise UnitError(f"unknown unit symbol {symbol!r}")
        return unit

    def by_iri(self, iri: Iri | str) -> Unit:
        key = iri.value if isinstance(iri, Iri) else iri
        unit = self._by_iri.get(key)
        if unit is None:
            raise UnitError(f"unknown unit IRI {key}")
        return unit

    def known(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    def units(self) -> list[Unit]:
        return sorted(set(self._by_symbol.values()), key=lambda u: u.symbol)


DEFAULT_UNITS = UnitTable()


def convert_unit(value: float, from_unit: Unit, to_unit: Unit) -> float:
    """((value * from.mult + from.off) - to.off) / to.mult over shared
    dimensions; pure scalings round once so decimal factors stay exact."""
    if from_unit.dimension != to_unit.dimension:
        raise UnitError(
            f"incompatible dimensions: {from_unit.dimension} vs {to_unit.dimension}"
        )
    if from_unit.si_offset == 0.0 and to_unit.si_offset == 0.0:
        ratio = from_unit.si_multiplier / to_unit.si_multiplier
        if ratio >= 1.0:
            return value * ratio
        return value / (to_unit.si_multiplier / from_unit.si_multiplier)
    si = value * from_unit.si_multiplier + from_unit.si_offset
    return (si - to_unit.si_offset) / to_unit.si_multiplier
