import math

import numpy as np
import pytest
from scipy.integrate import quad

from renyi_lab import (ConstraintError, ModelSpec, MODEL_DOCS, gaussian_grid,
                       make_model, mixture_chi2, mixture_finiteness,
                       pearson_vajda, sin_power_coefficients)
from conftest import model_of, pn_of


def test_make_model_kinds_and_errors():
    assert make_model({"kind": "uniform"}).name == "uniform"
    assert make_model(ModelSpec("normal", {"sigma2": 1.3})).name == "normal(sigma2=1.3)"
    with pytest.raises(ValueError):
        make_model({"kind": "cauchy"})
    assert set(MODEL_DOCS) == {
        "normal", "uniform", "bernoulli_sym", "bernoulli_asym", "bernoulli_sum",
        "gauss_scale_mixture", "power_density", "bernoulli_gauss",
        "trig_periodic", "sin_power", "counterexample_30_4"}


def test_uniform_model_basics(uniform_model):
    assert abs(uniform_model.support_radius - math.sqrt(3.0)) < 1e-15
    assert uniform_model.cdf(-2.0) == 0.0 and uniform_model.cdf(2.0) == 1.0
    assert abs(float(uniform_model.cdf(0.0)) - 0.5) < 1e-15
    # K at moderate and large arguments against the defining integral
    for t in (0.3, 2.0, 40.0, 400.0):
        direct = math.log(math.sinh(math.sqrt(3.0) * t) / (math.sqrt(3.0) * t))
        assert abs(float(uniform_model.log_laplace(t)) - direct) < 1e-12 * max(
            1.0, direct), t


def test_density_models_normalized_with_unit_moments():
    specs = ["uniform",
             {"kind": "power_density", "params": {"d": 2}},
             {"kind": "gauss_scale_mixture", "params": {"atoms": [[0.3, 0.5], [0.7, 1.1]]}},
             {"kind": "sin_power", "params": {"m": 4}},
             "counterexample_30_4"]
    for spec in specs:
        model = model_of(spec)
        r = model.support_radius
        pts = [-r, r] if r else None
        mass, _ = quad(model.density, -14, 14, limit=300, points=pts)
        var, _ = quad(lambda x: x * x * model.density(x), -14, 14, limit=300,
                      points=pts)
        mean, _ = quad(lambda x: x * model.density(x), -14, 14, limit=300,
                       points=pts)
        assert abs(mass - 1.0) < 1e-9, spec
        assert abs(mean) < 1e-9, spec
        assert abs(var - model.cumulants[1]) < 1e-8, spec


def test_power_density_even_moments():
    # E X^{2k} = (2k + 2d - 1)!! / (2d - 1)!!
    for d in (1, 2, 3):
        model = model_of({"kind": "power_density", "params": {"d": d}})
        df = math.prod(range(2 * d - 1, 0, -2))
        for k in (1, 2, 3):
            target = math.prod(range(2 * k + 2 * d - 1, 0, -2)) / df
            val, _ = quad(lambda x: x ** (2 * k) * model.density(x), -14, 14,
                          limit=300)
            assert abs(val - target) < 1e-8 * target, (d, k)


def test_bernoulli_sum_approaches_uniform():
    # weights sqrt(3)/2^k: the series sums to the uniform on [-sqrt3, sqrt3]
    w = [math.sqrt(3.0) * 0.5 ** k for k in range(1, 41)]
    model = model_of({"kind": "bernoulli_sum", "params": {"weights": w}})
    uni = model_of("uniform")
    ts = np.linspace(-4.0, 4.0, 33)
    assert np.max(np.abs(model.log_laplace(ts) - uni.log_laplace(ts))) < 1e-7
    assert abs(model.cumulants[1] - 1.0) < 1e-12


def test_gauss_scale_mixture_kappa_path():
    # kappa = 1 makes the mixing density constant, so the quadrature is exact
    model = model_of({"kind": "gauss_scale_mixture",
                      "params": {"kappa": 1.0, "upper": 1.0}})
    assert abs(model.cumulants[1] - 0.5) < 1e-10
    mass, _ = quad(model.density, -10, 10, limit=200)
    assert abs(mass - 1.0) < 1e-9
    # singular mixing density (kappa < 1) still yields a proper density
    sing = model_of({"kind": "gauss_scale_mixture",
                     "params": {"kappa": 0.5, "upper": 1.0}})
    mass, _ = quad(sing.density, -10, 10, limit=200)
    assert abs(mass - 1.0) < 1e-9
    with pytest.raises(ValueError):
        model_of({"kind": "gauss_scale_mixture", "params": {"kappa": 0.5, "upper": 2.5}})
    with pytest.raises(ValueError):
        model_of({"kind": "gauss_scale_mixture", "params": {}})
    with pytest.raises(ValueError):
        model_of({"kind": "gauss_scale_mixture", "params": {"atoms": [[1.0, 2.0]]}})


def test_bernoulli_gauss_tangency():
    model = model_of({"kind": "bernoulli_gauss", "params": {"p": 0.2, "beta": 1.127}})
    a, b = model.meta["a"], model.meta["b"]
    beta, t_star = model.meta["beta"], model.meta["t_star"]
    assert abs(a * a + b * b * 1.0 - (a * a + b * b)) < 1e-15
    assert abs(model.cumulants[2] - a ** 3 * 0.2 * 0.8 * 0.6 / (0.2 * 0.8) ** 1.5
               * (0.2 * 0.8) ** 1.5) < 1e-12  # gamma3 = a^3 p q (q - p)
    # K touches beta t^2/2 exactly at t*, stays strictly below elsewhere
    gap = lambda t: 0.5 * beta * t * t - float(model.log_laplace(t))
    assert abs(gap(t_star)) < 1e-12
    # equality also holds trivially at t = 0; strict everywhere else
    ts = np.linspace(-8.0, 8.0, 1001)
    gaps = 0.5 * beta * ts * ts - model.log_laplace(ts)
    away = (np.abs(ts - t_star) > 0.05) & (np.abs(ts) > 0.05)
    assert np.all(gaps[away] > 0.0)


def test_bernoulli_gauss_infeasible():
    with pytest.raises(ConstraintError):
        model_of({"kind": "bernoulli_gauss", "params": {"p": 0.5, "beta": 1.1}})
    with pytest.raises(ValueError):
        model_of({"kind": "bernoulli_gauss", "params": {"p": 0.2, "beta": 0.9}})


def test_sin_power_coefficients_identity():
    ts = np.linspace(0.0, 2.0 * math.pi, 97)
    for m in (4, 6, 8):
        a0, a = sin_power_coefficients(m)
        rec = a0 + sum(ak * np.cos(k * ts) for k, ak in enumerate(a, 1) if ak)
        assert np.max(np.abs(rec - np.sin(ts) ** m)) < 1e-12, m
    a0, a = sin_power_coefficients(4)
    assert (a0, a[1], a[3]) == (3.0 / 8.0, -0.5, 1.0 / 8.0)
    with pytest.raises(ValueError):
        sin_power_coefficients(3)


def test_sin_power_model_psi_and_cmax():
    model = model_of({"kind": "sin_power", "params": {"m": 4}})
    a0, a, b, c = model.meta["trig"]
    c_max = 8.0 / (3.0 + 4.0 * math.exp(2.0) + math.exp(8.0))
    assert abs(model.meta["c_max"] - c_max) < 1e-12 * c_max
    assert abs(c - 0.5 * c_max) < 1e-12 * c_max
    assert model.meta["period"] == math.pi
    # psi = e^{K - t^2/2} equals 1 - c sin^4 and repeats over three periods
    ts = np.linspace(-1.5 * math.pi, 1.5 * math.pi, 301)
    psi = np.exp(model.log_laplace(ts) - 0.5 * ts * ts)
    assert np.max(np.abs(psi - (1.0 - c * np.sin(ts) ** 4))) < 1e-9
    assert np.max(np.abs(psi - np.exp(
        model.log_laplace(ts + 3.0 * math.pi) - 0.5 * (ts + 3.0 * math.pi) ** 2))) < 1e-9


def test_sin_power_m2_violates_constraints():
    with pytest.raises(ConstraintError):
        model_of({"kind": "sin_power", "params": {"m": 2}})


def test_trig_periodic_c_too_large():
    with pytest.raises(ConstraintError):
        model_of({"kind": "sin_power", "params": {"m": 4, "c": 1.0}})


def test_counterexample_structure():
    model = model_of("counterexample_30_4")
    a0, a, b, c = model.meta["trig"]
    assert not any(b)
    assert (a0, tuple(a)) == (9.0 / 4.0, (0.0, -15.0 / 4.0, 0.0, 17.0 / 8.0,
                                          0.0, -3.0 / 4.0, 0.0, 1.0 / 8.0))
    ts = np.linspace(0.0, math.pi, 181)
    p = a0 + sum(ak * np.cos(k * ts) for k, ak in enumerate(a, 1) if ak)
    target = (1.0 - 4.0 * np.sin(ts) ** 2) ** 2 * np.sin(ts) ** 4
    assert np.max(np.abs(p - target)) < 1e-12
    assert model.meta["period"] == math.pi
    assert model.cumulants[2] == 0.0
    g4 = -c * sum(k ** 4 * ak for k, ak in enumerate(a, 1))
    assert abs(model.cumulants[3] - g4) < 1e-15


def test_mixture_chi2_examples():
    # point mass at 1/2: 1 + chi^2 = (3/4)^{-1/2}
    assert abs(mixture_chi2([[1.0, 0.5]]) - (2.0 / math.sqrt(3.0) - 1.0)) < 1e-14
    assert abs(mixture_chi2([[1.0, 1.0]])) < 1e-15
    atoms = [[0.5, 0.7], [0.5, 1.3]]
    p = pn_of({"kind": "gauss_scale_mixture", "params": {"atoms": atoms}}, 1)
    grid = pearson_vajda(p, gaussian_grid(p), 2.0)
    assert abs(mixture_chi2(atoms) - grid) < 1e-5
    with pytest.raises(ValueError):
        mixture_chi2([[1.0, 2.0]])
    with pytest.raises(ValueError):
        mixture_chi2({"kappa": 0.5})


def test_mixture_finiteness_rule():
    # kappa = 1/12 needs n > 3; kappa = 1/8 needs n > 2
    assert [n for n in range(1, 7) if mixture_finiteness(1.0 / 12.0, 0.1, n)] == [4, 5, 6]
    assert [n for n in range(1, 7) if mixture_finiteness(1.0 / 8.0, 0.1, n)] == [3, 4, 5, 6]
    assert mixture_finiteness(1.0, 0.1, 1)
    with pytest.raises(ValueError):
        mixture_finiteness(-0.1, 0.1, 2)
    with pytest.raises(ValueError):
        mixture_finiteness(0.5, 0.0, 2)
    with pytest.raises(ValueError):
        mixture_finiteness(0.5, 0.1, 0)
