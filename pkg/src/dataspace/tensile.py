"""Tensile-curve evaluation: elastic modulus, Rp0.2 yield strength, true
stress/plastic strain conversion and Hockett-Sherby hardening fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TensileError(ValueError):
    pass


@dataclass(frozen=True)
class SpecimenGeometry:
    gauge_length: float  # L0 in mm
    thickness: float     # t in mm
    width: float         # b in mm

    def __post_init__(self):
        if min(self.gauge_length, self.thickness, self.width) <= 0:
            raise TensileError("geometry dimensions must be positive")

    @property
    def area(self) -> float:
        return self.width * self.thickness  # mm^2


@dataclass(frozen=True)
class TensileCurve:
    strain: np.ndarray  # engineering, dimensionless
    stress: np.ndarray  # engineering, MPa

    def __post_init__(self):
        object.__setattr__(self, "strain", np.asarray(self.strain, dtype=float))
        object.__setattr__(self, "stress", np.asarray(self.stress, dtype=float))
        if self.strain.shape != self.stress.shape or self.strain.ndim != 1:
            raise TensileError("strain and stress must be 1-d arrays of equal length")
        if self.strain.size < 20:
            raise TensileError("curve needs at least 20 points")
        if not np.all(np.isfinite(self.stress)) or not np.all(np.isfinite(self.strain)):
            raise TensileError("curve contains non-finite values")
        if not np.all(np.diff(self.strain) > 0):
            raise TensileError("strain must be strictly increasing")


@dataclass(frozen=True)
class MechanicalProperties:
    E: float      # MPa
    Rp02: float   # MPa
    Rm: float     # MPa
    Ag: float     # dimensionless

    def __post_init__(self):
        if self.E <= 0 or self.Rp02 <= 0 or self.Rm < self.Rp02:
            raise TensileError("properties violate E > 0 and Rm >= Rp02 > 0")


@dataclass(frozen=True)
class HockettSherbyParams:
    sigma_i: float
    sigma_sat: float
    a: float
    p: float
    rms_residual: float

    def __post_init__(self):
        if not (self.sigma_sat > self.sigma_i > 0):
            raise TensileError("requires sigma_sat > sigma_i > 0")
        if self.a <= 0 or not (0.3 <= self.p <= 2.0):
            raise TensileError("requires a > 0 and 0.3 <= p <= 2")


def derive_curve(
    force_n: np.ndarray, extension_mm: np.ndarray, geometry: SpecimenGeometry
) -> TensileCurve:
    """Engineering stress (MPa) and strain from force (N), extension (mm)."""
    force_n = np.asarray(force_n, dtype=float)
    extension_mm = np.asarray(extension_mm, dtype=float)
    if force_n.shape != extension_mm.shape:
        raise TensileError("force and extension arrays differ in length")
    if geometry.area <= 0:
        raise TensileError("zero cross-section")
    stress = force_n / geometry.area  # N / mm^2 = MPa
    strain = extension_mm / geometry.gauge_length

    # collapse duplicate or decreasing strain samples, keeping the first
    keep = [0]
    for i in range(1, strain.size):
        if strain[i] > strain[keep[-1]]:
            keep.append(i)
    if len(keep) < 20:
        raise TensileError("fewer than 20 points after cleanup")
    idx = np.asarray(keep)
    return TensileCurve(strain[idx], stress[idx])


@dataclass(frozen=True)
class ElasticFit:
    E: float
    window: tuple[float, float]  # stress bounds of the fit window
    r_squared: float
    n_points: int


def elastic_modulus(curve: TensileCurve) -> ElasticFit:
    """OLS slope over the stress window [0.10, upper]*max(stress); the upper
    bound starts at 0.40 and expands in 0.05 steps up to 0.55 until at least
    10 points fall in the window with R^2 >= 0.995."""
    smax = float(np.max(curve.stress))
    if smax <= 0:
        raise TensileError("no linear region")
    upper = 0.40
    while upper <= 0.55 + 1e-12:
        lo, hi = 0.10 * smax, upper * smax
        mask = (curve.stress >= lo) & (curve.stress <= hi)
        if int(mask.sum()) >= 10:
            x = curve.strain[mask]
            y = curve.stress[mask]
            slope, intercept = np.polyfit(x, y, 1)
            pred = slope * x + intercept
            ss_res = float(np.sum((y - pred) ** 2))
            ss_tot = float(np.sum((y - np.mean(y)) ** 2))
            r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
            if r2 >= 0.995 and slope > 0:
                return ElasticFit(float(slope), (lo, hi), r2, int(mask.sum()))
        upper = round(upper + 0.05, 2)
    raise TensileError("no linear region")


def yield_rp02(curve: TensileCurve, E: float) -> float:
    """Stress at the first intersection with the 0.2 % offset line
    sigma = E * (eps - 0.002), resolved by linear interpolation."""
    if E <= 0:
        raise TensileError("E must be positive")
    diff = curve.stress - E * (curve.strain - 0.002)
    for i in range(1, diff.size):
        if diff[i] == 0:
            return float(curve.stress[i])
        if diff[i - 1] > 0 and diff[i] < 0:
            t = diff[i - 1] / (diff[i - 1] - diff[i])
            return float(curve.stress[i - 1] + t * (curve.stress[i] - curve.stress[i - 1]))
    raise TensileError("specimen did not yield")


def tensile_strength(curve: TensileCurve) -> tuple[float, float]:
    """(Rm, Ag): max engineering stress and the strain where it occurs."""
    i = int(np.argmax(curve.stress))
    return float(curve.stress[i]), float(curve.strain[i])


def to_true_plastic(curve: TensileCurve, E: float) -> tuple[np.ndarray, np.ndarray]:
    """True stress and plastic strain up to uniform elongation."""
    if E <= 0:
        raise TensileError("E must be positive")
    _, ag = tensile_strength(curve)
    mask = curve.strain <= ag
    strain = curve.strain[mask]
    stress = curve.stress[mask]
    sigma_true = stress * (1.0 + strain)
    eps_true = np.log1p(strain)
    eps_p = eps_true - sigma_true / E
    keep = eps_p >= 1e-6
    if not np.any(keep):
        raise TensileError("empty plastic region")
    return eps_p[keep], sigma_true[keep]


# Hockett-Sherby fit ------------------------------------------------------

_BOUNDS_EPS = 1e-6


def hockett_sherby(eps_p: np.ndarray, sigma_i: float, sigma_sat: float, a: float, p: float):
    return sigma_sat - (sigma_sat - sigma_i) * np.exp(-a * np.power(eps_p, p))


def _project(params: np.ndarray) -> np.ndarray:
    sigma_i, sigma_sat, a, p = params
    sigma_i = max(sigma_i, _BOUNDS_EPS)
    sigma_sat = max(sigma_sat, sigma_i * (1 + _BOUNDS_EPS))
    a = max(a, _BOUNDS_EPS)
    p = min(max(p, 0.3), 2.0)
    return np.array([sigma_i, sigma_sat, a, p])


def fit_hockett_sherby(eps_p: np.ndarray, sigma_true: np.ndarray) -> HockettSherbyParams:
    """Levenberg-Marquardt with a finite-difference Jacobian and projection
    onto the parameter bounds; accepts only cost-decreasing steps."""
    eps_p = np.asarray(eps_p, dtype=float)
    sigma_true = np.asarray(sigma_true, dtype=float)
    if eps_p.size < 10:
        raise TensileError("need at least 10 plastic points")

    params = _project(
        np.array([float(sigma_true[0]), 1.2 * float(np.max(sigma_true)), 5.0, 1.0])
    )

    def residual(p):
        return hockett_sherby(eps_p, *p) - sigma_true

    def jacobian(p, r0):
        J = np.empty((eps_p.size, 4))
        for j in range(4):
            step = 1e-7 * max(abs(p[j]), 1.0)
            q = p.copy()
            q[j] += step
            J[:, j] = (residual(q) - r0) / step
        return J

    r = residual(params)
    cost = float(r @ r)
    lam = 1e-3
    for _ in range(200):
        J = jacobian(params, r)
        g = J.T @ r
        H = J.T @ J
        stepped = False
        for _ in range(30):
            try:
                delta = np.linalg.solve(H + lam * np.diag(np.diag(H)) + 1e-12 * np.eye(4), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            candidate = _project(params + delta)
            rc = residual(candidate)
            new_cost = float(rc @ rc)
            if new_cost < cost:
                params, r = candidate, rc
                rel = (cost - new_cost) / max(cost, 1e-300)
                cost = new_cost
                lam = max(lam / 10, 1e-12)
                stepped = True
                if rel < 1e-10:
                    return _finish(params, cost, eps_p.size)
                break
            lam *= 10
        if not stepped:
            return _finish(params, cost, eps_p.size)
    return _finish(params, cost, eps_p.size)


def _finish(params: np.ndarray, cost: float, n: int) -> HockettSherbyParams:
    rms = float(np.sqrt(cost / n))
    sigma_i, sigma_sat, a, p = (float(v) for v in params)
    if sigma_sat - sigma_i < 1e-3:
        raise TensileError("non-convergence: saturation stress degenerates to initial yield")
    return HockettSherbyParams(sigma_i, sigma_sat, a, p, rms)


def evaluate_curve(curve: TensileCurve) -> tuple[MechanicalProperties, HockettSherbyParams | None]:
    """Full evaluation pipeline; the model fit is skipped for materials
    without a usable plastic region."""
    fit = elastic_modulus(curve)
    rp02 = yield_rp02(curve, fit.E)
    rm, ag = tensile_strength(curve)
    props = MechanicalProperties(fit.E, rp02, rm, ag)
    try:
        eps_p, sigma_true = to_true_plastic(curve, fit.E)
        hs = fit_hockett_sherby(eps_p, sigma_true)
    except TensileError:
        hs = None
    return props, hs
