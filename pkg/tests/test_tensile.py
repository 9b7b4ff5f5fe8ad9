import numpy as np
import pytest

from dataspace.tensile import (
    HockettSherbyParams,
    MechanicalProperties,
    SpecimenGeometry,
    TensileCurve,
    TensileError,
    derive_curve,
    elastic_modulus,
    evaluate_curve,
    fit_hockett_sherby,
    hockett_sherby,
    to_true_plastic,
    yield_rp02,
)

E_REF = 210000.0


def synthetic_curve(sigma_i=200.0, sigma_sat=420.0, a=9.0, p=0.9, E=E_REF,
                    eps_p_max=0.30, noise=0.0, seed=None):
    """Engineering curve built by inverting the true-stress definitions from
    a known elastic slope and hardening law; the fit must recover them."""
    sigma_el = np.arange(5.0, sigma_i, 5.0)
    eps_el = sigma_el / E

    eps_p = np.linspace(5e-4, eps_p_max, 60)
    sigma_true = hockett_sherby(eps_p, sigma_i, sigma_sat, a, p)
    eps_true = eps_p + sigma_true / E
    eps_pl = np.expm1(eps_true)
    sigma_pl = sigma_true * np.exp(-eps_true)

    strain = np.concatenate([eps_el, eps_pl])
    stress = np.concatenate([sigma_el, sigma_pl])
    if noise:
        rng = np.random.default_rng(seed)
        stress = stress + rng.normal(0.0, noise, size=stress.size)
    return TensileCurve(strain, stress)


# validation ------------------------------------------------------------


def test_curve_validation():
    with pytest.raises(TensileError):
        TensileCurve(np.linspace(0, 1, 10), np.linspace(0, 1, 10))  # too short
    with pytest.raises(TensileError):
        TensileCurve(np.zeros(25), np.linspace(0, 1, 25))  # not increasing
    eps = np.linspace(0.001, 0.1, 25)
    bad = np.linspace(1, 100, 25)
    bad[3] = np.nan
    with pytest.raises(TensileError):
        TensileCurve(eps, bad)
    with pytest.raises(TensileError):
        TensileCurve(eps, np.linspace(1, 100, 24))


def test_geometry_and_properties_validation():
    with pytest.raises(TensileError):
        SpecimenGeometry(80.0, -1.0, 20.0)
    geo = SpecimenGeometry(80.0, 1.55, 20.04)
    assert geo.area == pytest.approx(1.55 * 20.04)
    with pytest.raises(TensileError):
        MechanicalProperties(E=210000, Rp02=300, Rm=250, Ag=0.1)  # Rm < Rp02
    with pytest.raises(TensileError):
        HockettSherbyParams(200, 150, 9, 0.9, 0.0)  # sat below initial
    with pytest.raises(TensileError):
        HockettSherbyParams(200, 420, 9, 2.5, 0.0)  # exponent out of range


def test_derive_curve_converts_and_cleans():
    geo = SpecimenGeometry(gauge_length=80.0, thickness=2.0, width=10.0)  # area 20
    force = np.linspace(100.0, 2100.0, 30)
    ext = np.linspace(0.08, 1.68, 30)
    curve = derive_curve(force, ext, geo)
    assert curve.stress[0] == pytest.approx(5.0)
    assert curve.strain[0] == pytest.approx(0.001)

    # duplicated strain samples collapse, keeping the first
    force2 = np.concatenate([force, force[-1:] + 10])
    ext2 = np.concatenate([ext, ext[-1:]])
    cleaned = derive_curve(force2, ext2, geo)
    assert cleaned.strain.size == 30


# elastic modulus -------------------------------------------------------


def test_elastic_modulus_exact_on_linear_data():
    curve = synthetic_curve()
    fit = elastic_modulus(curve)
    assert fit.E == pytest.approx(E_REF, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points >= 10
    lo, hi = fit.window
    smax = float(np.max(curve.stress))
    assert lo == pytest.approx(0.10 * smax)


def test_elastic_modulus_rejects_jagged_data():
    eps = np.linspace(0.001, 0.05, 60)
    stress = 50.0 + 25.0 * np.sin(np.arange(60) * 2.1)
    stress = stress - stress.min() + 10.0  # keep it positive, still oscillating
    with pytest.raises(TensileError):
        elastic_modulus(TensileCurve(eps, stress))


# yield strength --------------------------------------------------------


def test_rp02_matches_closed_form_on_bilinear_curve():
    E, sigma0, H, eps0 = 210000.0, 200.0, 1500.0, 200.0 / 210000.0
    eps_el = np.linspace(1e-4, eps0, 60)
    eps_pl = np.linspace(eps0 + 1e-5, 0.05, 200)
    strain = np.concatenate([eps_el, eps_pl])
    stress = np.concatenate([E * eps_el, sigma0 + H * (eps_pl - eps0)])
    curve = TensileCurve(strain, stress)

    eps_star = (sigma0 - H * eps0 + 0.002 * E) / (E - H)
    rp02_exact = E * (eps_star - 0.002)
    fit = elastic_modulus(curve)
    assert fit.E == pytest.approx(E, rel=1e-6)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-9)
    assert yield_rp02(curve, fit.E) == pytest.approx(rp02_exact, abs=0.2)


def test_rp02_errors():
    eps = np.linspace(1e-4, 0.001, 25)
    curve = TensileCurve(eps, E_REF * eps)  # purely elastic
    with pytest.raises(TensileError):
        yield_rp02(curve, E_REF)
    with pytest.raises(TensileError):
        yield_rp02(curve, -1.0)


# true stress / plastic strain -------------------------------------------


def test_true_plastic_conversion_formulas():
    curve = synthetic_curve()
    eps_p, sigma_true = to_true_plastic(curve, E_REF)
    # recompute from the definitions on the raw curve
    i_max = int(np.argmax(curve.stress))
    ag = curve.strain[i_max]
    mask = curve.strain <= ag
    expected_sigma = curve.stress[mask] * (1 + curve.strain[mask])
    expected_eps = np.log1p(curve.strain[mask]) - expected_sigma / E_REF
    keep = expected_eps >= 1e-6
    assert np.allclose(sigma_true, expected_sigma[keep], rtol=1e-12)
    assert np.allclose(eps_p, expected_eps[keep], rtol=1e-12)
    assert np.all(eps_p >= 1e-6)


# Hockett-Sherby fit ------------------------------------------------------


def test_forward_model_shape():
    eps = np.array([0.0, 0.01, 1e6])
    sigma = hockett_sherby(eps, 200.0, 420.0, 9.0, 0.9)
    assert sigma[0] == pytest.approx(200.0)
    assert sigma[-1] == pytest.approx(420.0)
    assert np.all(np.diff(sigma) > 0)


@pytest.mark.parametrize(
    "params",
    [
        (200.0, 420.0, 9.0, 0.9),
        (150.0, 300.0, 15.0, 1.1),
        (350.0, 800.0, 4.0, 0.7),
    ],
)
def test_fit_recovers_known_parameters_exactly(params):
    sigma_i, sigma_sat, a, p = params
    eps_p = np.linspace(5e-4, 0.25, 80)
    sigma = hockett_sherby(eps_p, sigma_i, sigma_sat, a, p)
    fit = fit_hockett_sherby(eps_p, sigma)
    assert fit.sigma_i == pytest.approx(sigma_i, rel=5e-3)
    assert fit.sigma_sat == pytest.approx(sigma_sat, rel=5e-3)
    assert fit.a == pytest.approx(a, rel=5e-3)
    assert fit.p == pytest.approx(p, rel=5e-3)
    assert fit.rms_residual < 1e-3


def test_fit_tolerates_measurement_noise():
    eps_p = np.linspace(5e-4, 0.25, 120)
    rng = np.random.default_rng(20260823)
    sigma = hockett_sherby(eps_p, 200.0, 420.0, 9.0, 0.9) + rng.normal(0, 1.0, eps_p.size)
    fit = fit_hockett_sherby(eps_p, sigma)
    assert fit.sigma_i == pytest.approx(200.0, rel=0.05)
    assert fit.sigma_sat == pytest.approx(420.0, rel=0.05)
    assert fit.a == pytest.approx(9.0, rel=0.05)
    assert fit.p == pytest.approx(0.9, rel=0.05)
    assert fit.rms_residual <= 5.0


def test_fit_needs_enough_points():
    eps_p = np.linspace(1e-3, 0.1, 5)
    with pytest.raises(TensileError):
        fit_hockett_sherby(eps_p, hockett_sherby(eps_p, 200, 420, 9, 0.9))


# full pipeline ------------------------------------------------------------


def test_evaluate_curve_recovers_everything():
    curve = synthetic_curve()
    props, hs = evaluate_curve(curve)
    assert props.E == pytest.approx(E_REF, rel=1e-9)
    assert 200.0 < props.Rp02 < 230.0
    assert props.Rm == pytest.approx(float(np.max(curve.stress)))
    assert hs is not None
    assert hs.sigma_i == pytest.approx(200.0, rel=5e-3)
    assert hs.sigma_sat == pytest.approx(420.0, rel=5e-3)
    assert hs.a == pytest.approx(9.0, rel=5e-3)
    assert hs.p == pytest.approx(0.9, rel=5e-3)


def test_evaluate_scale_invariance():
    """Doubling force and cross-section leaves every property unchanged."""
    geo1 = SpecimenGeometry(80.0, 1.55, 20.0)
    geo2 = SpecimenGeometry(80.0, 3.10, 20.0)
    base = synthetic_curve()
    force1 = base.stress * geo1.area
    force2 = base.stress * geo2.area
    ext = base.strain * 80.0
    props1, hs1 = evaluate_curve(derive_curve(force1, ext, geo1))
    props2, hs2 = evaluate_curve(derive_curve(force2, ext, geo2))
    assert props1.E == pytest.approx(props2.E, rel=1e-9)
    assert props1.Rp02 == pytest.approx(props2.Rp02, rel=1e-9)
    assert props1.Rm == pytest.approx(props2.Rm, rel=1e-9)
    assert hs1.sigma_sat == pytest.approx(hs2.sigma_sat, rel=1e-6)
