import math

import numpy as np
import pytest

from renyi_lab import (entropy_young, gaussian_grid, gaussian_relative_entropy,
                       gaussian_smooth, infinite_order, kl, orlicz_norm,
                       pearson_vajda, relative_fisher, renyi_tsallis,
                       tv_hellinger, wasserstein2)
from conftest import model_of, pn_of

ALPHAS = (0.5, 1.5, 2.0, 3.0)


def _gauss_pair(normal_grid, a=0.0, lam=1.0):
    return gaussian_grid(normal_grid, mean=a, var=lam), normal_grid


def smooth_zoo(normal_grid):
    """Smooth test densities paired with the standard normal grid."""
    pairs = [
        ("uniform Z_8", pn_of("uniform", 8)),
        ("power d=1", pn_of({"kind": "power_density", "params": {"d": 1}}, 1)),
        ("scale mixture", pn_of({"kind": "gauss_scale_mixture",
                                 "params": {"atoms": [[0.5, 0.7], [0.5, 1.3]]}}, 1)),
        ("sin4", pn_of("sin_power", 1)),
    ]
    return [(name, p, gaussian_grid(p)) for name, p in pairs]


def test_gaussian_kl_closed_form(normal_grid):
    p, q = _gauss_pair(normal_grid, a=0.3, lam=1.44)
    target = gaussian_relative_entropy(0.3, 1.44)
    assert abs(kl(p, q) - target) < 1e-9


def test_gaussian_renyi_mean_shift(normal_grid):
    # D_alpha(N(a,1) || N(0,1)) = alpha a^2 / 2 for any order
    a = 0.4
    p, q = _gauss_pair(normal_grid, a=a)
    for alpha in ALPHAS:
        d, t = renyi_tsallis(p, q, alpha)
        assert abs(d.value - 0.5 * alpha * a * a) < 1e-9
        # T is the stated monotone transform of D
        implied = (math.exp((alpha - 1.0) * d.value) - 1.0) / (alpha - 1.0)
        assert abs(t.value - implied) < 1e-12 * (1.0 + abs(implied))


def test_kl_is_renyi_limit(normal_grid):
    p, q = _gauss_pair(normal_grid, a=0.3, lam=1.2)
    base = kl(p, q)
    d_lo, _ = renyi_tsallis(p, q, 1.0 - 1e-5)
    d_hi, _ = renyi_tsallis(p, q, 1.0 + 1e-5)
    assert d_lo.value <= base + 1e-7 <= d_hi.value + 2e-7
    assert abs(0.5 * (d_lo.value + d_hi.value) - base) < 1e-6


def test_alpha_monotonicity(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        vals = [renyi_tsallis(p, q, a)[0].value for a in ALPHAS]
        vals.append(infinite_order(p, q)[0])
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:])), name


def test_infinite_order_transform(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        dinf, tinf = infinite_order(p, q)
        assert abs(math.exp(dinf) - 1.0 - tinf) < 1e-12 * (1.0 + abs(tinf)), name


def test_hellinger_tsallis_half(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        tv, h = tv_hellinger(p, q)
        _, t_half = renyi_tsallis(p, q, 0.5)
        assert abs(h * h - 0.5 * t_half.value) < 1e-10, name
        assert 0.0 <= tv <= 2.0


def test_chi1_equals_tv(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        tv, _ = tv_hellinger(p, q)
        assert abs(pearson_vajda(p, q, 1.0) - tv) < 1e-12, name


def test_chi_alpha_root_monotone(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        roots = [pearson_vajda(p, q, a) ** (1.0 / a) for a in (1.0, 1.5, 2.0, 3.0)]
        assert all(b >= a - 1e-12 for a, b in zip(roots, roots[1:])), name


def test_tsallis_chi_equivalence_bounds(normal_grid):
    # upper: T_a <= ((1 + chi_a^(1/a))^a - 1)/(a-1); lower: the 3/16 and
    # a 3^-a variants on their respective alpha ranges
    for name, p, q in smooth_zoo(normal_grid):
        for alpha in (1.5, 2.0, 3.0):
            _, t = renyi_tsallis(p, q, alpha)
            chi = pearson_vajda(p, q, alpha)
            upper = ((1.0 + chi ** (1.0 / alpha)) ** alpha - 1.0) / (alpha - 1.0)
            assert t.value <= upper + 1e-10, name
            if alpha <= 2.0:
                lower = (3.0 / 16.0) * min(chi, chi ** (2.0 / alpha))
            else:
                lower = alpha * 3.0 ** (-alpha) * chi
            assert t.value >= lower - 1e-10, (name, alpha)


def test_pinsker(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        tv, _ = tv_hellinger(p, q)
        assert kl(p, q) >= 0.5 * tv * tv - 1e-12, name


def test_gilardoni(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        tv, _ = tv_hellinger(p, q)
        for alpha in (0.25, 0.5, 0.75):
            d, _ = renyi_tsallis(p, q, alpha)
            assert d.value >= 0.5 * alpha * tv * tv - 1e-12, name
            assert d.value <= tv / (1.0 - alpha) + 1e-12, name


def test_talagrand(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        w2 = wasserstein2(p, q)
        assert kl(p, q) >= 0.5 * w2 * w2 - 1e-10, name


def test_log_sobolev(normal_grid):
    for name, p, q in smooth_zoo(normal_grid):
        if name == "uniform Z_8":
            continue  # support edge spoils the derivative estimates
        fisher = relative_fisher(p, q)
        assert kl(p, q) <= 0.5 * fisher + 1e-12, name


def test_relative_fisher_gaussian(normal_grid):
    p, q = _gauss_pair(normal_grid, a=0.5)
    assert abs(relative_fisher(p, q) - 0.25) < 1e-6
    p2, _ = _gauss_pair(normal_grid, lam=1.3)
    assert abs(relative_fisher(p2, q) - 0.09 / 1.3) < 1e-6


def test_de_bruijn(normal_grid):
    # D(X || Z) = int_0^1 I(X_t || Z) dt / (2t) along X_t = sqrt(t) X + sqrt(1-t) Z
    p = pn_of({"kind": "gauss_scale_mixture",
               "params": {"atoms": [[0.5, 0.7], [0.5, 1.3]]}}, 1)
    q = gaussian_grid(p)
    target = kl(p, q)
    ts, ws = np.polynomial.legendre.leggauss(24)
    ts = 0.5 * (ts + 1.0)
    ws = 0.5 * ws
    total = 0.0
    for t, w in zip(ts, ws):
        pt = gaussian_smooth(p, float(t)) if t < 1.0 else p
        total += w * relative_fisher(pt, q) / (2.0 * t)
    assert abs(total - target) < 0.02 * target


def test_heat_flow_contracts_divergences(normal_grid):
    p = pn_of({"kind": "power_density", "params": {"d": 1}}, 1)
    q = gaussian_grid(p)
    base_kl = kl(p, q)
    base_chi = pearson_vajda(p, q, 2.0)
    for t in (0.8, 0.5, 0.2):
        pt = gaussian_smooth(p, t)
        assert kl(pt, q) <= base_kl + 1e-10
        assert pearson_vajda(pt, q, 2.0) <= base_chi + 1e-10


def test_infinite_sentinels(normal_grid):
    # chi^2 against the normal blows up once the variance reaches 2
    p, q = _gauss_pair(normal_grid, lam=2.5)
    assert math.isinf(pearson_vajda(p, q, 2.0))
    d, t = renyi_tsallis(p, q, 2.0)
    assert math.isinf(d.value) and math.isinf(t.value)


def test_orlicz_norm_homogeneous(normal_grid):
    u = normal_grid.values * (normal_grid.x ** 2 - 1.0)
    base = orlicz_norm(u, normal_grid.step, entropy_young)
    triple = orlicz_norm(3.0 * u, normal_grid.step, entropy_young)
    assert abs(triple - 3.0 * base) < 1e-6 * triple
    assert orlicz_norm(np.zeros(8), 0.1, entropy_young) == 0.0


def test_entropy_young_shape():
    r = np.linspace(-3, 3, 31)
    y = entropy_young(r)
    assert y[15] == 0.0
    assert np.all(y >= 0.0)
    mid = entropy_young(0.5 * (r[:-1] + r[1:]))
    assert np.all(mid <= 0.5 * (y[:-1] + y[1:]) + 1e-12)  # convexity
