import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nucsketch.errors import InputError, ParameterError
from nucsketch.sketch import (
    SketchConfig,
    approx_mm,
    gen_sketch,
    mm_error,
    plan_jl,
    plan_nuclear,
    plan_stable,
    sketch_factors,
)

unit = st.floats(0.01, 0.99)
ranks = st.floats(1.0, 50.0)


def unit_cfg(**kw):
    base = dict(epsilon=0.5, delta=0.5, c1=1.0, c3=1.0, c_mult=1.0)
    base.update(kw)
    return SketchConfig(**base)


def test_plan_nuclear_hand_evaluation():
    plan = plan_nuclear(2.0, 2.0, unit_cfg())
    # theta = floor(1 * 4 / 0.25); 8 ln(16) / 0.25; ln(ceil(ln(2e))) / 0.25 = ln 2 / 0.25
    assert plan.theta == 16
    assert plan.delta_term == pytest.approx(32 * math.log(16), rel=1e-14)
    assert plan.delta_term == pytest.approx(88.723, abs=5e-4)
    assert plan.loglog_term == pytest.approx(4 * math.log(2), rel=1e-14)
    assert plan.loglog_term == pytest.approx(2.773, abs=5e-4)
    assert plan.t_total == 108


def test_plan_nuclear_scaling():
    base = plan_nuclear(2.0, 2.0, unit_cfg())
    doubled = plan_nuclear(4.0, 4.0, unit_cfg())
    assert doubled.theta == 2 * base.theta
    assert doubled.t_total > base.t_total
    finer = plan_nuclear(2.0, 2.0, unit_cfg(epsilon=0.25))
    assert finer.theta == 4 * base.theta


@pytest.mark.parametrize("nr", [0.0, 0.5, float("nan"), float("inf")])
def test_plan_nuclear_rejects_ranks(nr):
    with pytest.raises(ParameterError):
        plan_nuclear(nr, 2.0, unit_cfg())
    with pytest.raises(ParameterError):
        plan_nuclear(2.0, nr, unit_cfg())


@given(ranks, ranks, ranks, ranks, unit, unit, unit, unit)
def test_plan_nuclear_monotone(nx1, nx2, ny1, ny2, e1, e2, d1, d2):
    (nx1, nx2), (ny1, ny2) = sorted((nx1, nx2)), sorted((ny1, ny2))
    (e1, e2), (d1, d2) = sorted((e1, e2)), sorted((d1, d2))
    small = plan_nuclear(nx1, ny1, unit_cfg(epsilon=e2, delta=d2)).t_total
    large = plan_nuclear(nx2, ny2, unit_cfg(epsilon=e1, delta=d1)).t_total
    assert small <= large
    assert small >= 1


def test_plan_nuclear_floor_of_one():
    assert plan_nuclear(1.0, 1.0, unit_cfg(epsilon=0.99, delta=0.99, c_mult=1e-9)).t_total == 1


def test_plan_stable():
    assert plan_stable(2.0, 2.0, 0.5, 1.0) == 64
    assert plan_stable(2.0, 2.0, 0.25, 1.0) == 16 * 64
    with pytest.raises(ParameterError):
        plan_stable(2.0, 2.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        plan_stable(0.5, 2.0, 0.5, 1.0)


def test_plan_jl():
    assert plan_jl(55, 0.5, 1.0) == 17
    assert plan_jl(2, 0.99, 1.0) == 1
    with pytest.raises(ParameterError):
        plan_jl(55, 1.0, 1.0)
    with pytest.raises(ParameterError):
        plan_jl(1, 0.5, 1.0)


@pytest.mark.parametrize(
    "kw",
    [
        dict(epsilon=0.0), dict(epsilon=1.0), dict(delta=0.0), dict(delta=1.0),
        dict(c1=0.0), dict(c2=-1.0), dict(c3=0.5), dict(c_mult=0.0), dict(seed=-1), dict(seed=2**64),
    ],
)
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        SketchConfig(**kw)


def test_gen_sketch_deterministic():
    a, b = gen_sketch(7, 11, 99), gen_sketch(7, 11, 99)
    assert a == b
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, gen_sketch(7, 11, 100).entries)
    assert a.entries.shape == (7, 11)


def test_gen_sketch_moments():
    t, d = 64, 1000
    g = gen_sketch(t, d, 2024).entries
    assert abs(g.mean()) <= 4 / math.sqrt(t * d)
    assert g.var() == pytest.approx(1 / t, rel=0.10)


def test_gen_sketch_row_norms():
    # E ||sqrt(t) g_row||^2 = d; averaged over 100 seeds x 8 rows, sd is sqrt(2d/800)
    t, d = 8, 30
    norms = [np.sum((math.sqrt(t) * gen_sketch(t, d, s).entries) ** 2, axis=1) for s in range(100)]
    assert np.mean(norms) == pytest.approx(d, abs=4 * math.sqrt(2 * d / 800))


def test_gen_sketch_rejects_bad_shape():
    with pytest.raises(ParameterError):
        gen_sketch(0, 3, 1)
    with pytest.raises(ParameterError):
        gen_sketch(3, 0, 1)


def test_sketch_is_read_only():
    g = gen_sketch(3, 3, 0)
    with pytest.raises(ValueError):
        g.entries[0, 0] = 1.0


def test_approx_mm_examples(rng):
    x, y = rng.standard_normal((10, 50)), rng.standard_normal((50, 10))
    assert not np.any(approx_mm(x, np.zeros((50, 4)), gen_sketch(20, 50, 1)))
    np.testing.assert_array_equal(approx_mm(x, y, np.eye(50)), x @ y)
    prod = approx_mm(x, y, gen_sketch(200, 50, 5))
    assert np.allclose(approx_mm(x, y, gen_sketch(200, 50, 5)), prod)
    assert mm_error(x, y, prod) < 1.0


def test_sketch_factors_shapes(rng):
    x, y = rng.standard_normal((4, 9)), rng.standard_normal((9, 3))
    g = gen_sketch(5, 9, 0)
    xh, yh = sketch_factors(x, y, g)
    assert xh.shape == (4, 5) and yh.shape == (5, 3)
    np.testing.assert_allclose(xh @ yh, approx_mm(x, y, g))


def test_approx_mm_dimension_mismatch(rng):
    x, y = rng.standard_normal((4, 9)), rng.standard_normal((9, 3))
    with pytest.raises(InputError):
        approx_mm(x, y, gen_sketch(5, 8, 0))
    with pytest.raises(InputError):
        approx_mm(x, y.T, gen_sketch(5, 9, 0))


def test_mm_error_examples(rng):
    x, y = rng.standard_normal((5, 7)), rng.standard_normal((7, 6))
    assert mm_error(x, y, x @ y) == 0.0
    u = rng.standard_normal(5)
    v = rng.standard_normal(6)
    e = np.linalg.norm(x, 2) * np.linalg.norm(y, 2) * np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v))
    assert mm_error(x, y, x @ y + e) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(InputError):
        mm_error(np.zeros((5, 7)), y, np.zeros((5, 6)))
    with pytest.raises(InputError):
        mm_error(x, y, np.zeros((5, 5)))


@given(st.integers(0, 2**32), st.floats(0.01, 100.0))
def test_mm_error_homogeneity(seed, c):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal((4, 6)), rng.standard_normal((6, 3))
    prod = approx_mm(x, y, gen_sketch(5, 6, seed))
    assert mm_error(c * x, y, c * prod) == pytest.approx(mm_error(x, y, prod), rel=1e-12, abs=1e-15)


@given(st.integers(0, 2**32), st.floats(-5, 5), st.floats(-5, 5))
def test_approx_mm_bilinear(seed, a, b):
    rng = np.random.default_rng(seed)
    x1, x2 = rng.standard_normal((2, 4, 6))
    y1, y2 = rng.standard_normal((2, 6, 3))
    g = gen_sketch(5, 6, seed)
    left = approx_mm(a * x1 + b * x2, y1, g)
    np.testing.assert_allclose(left, a * approx_mm(x1, y1, g) + b * approx_mm(x2, y1, g), atol=1e-10)
    right = approx_mm(x1, a * y1 + b * y2, g)
    np.testing.assert_allclose(right, a * approx_mm(x1, y1, g) + b * approx_mm(x1, y2, g), atol=1e-10)


def test_expectation_identity():
    t, d, trials = 64, 20, 2000
    acc = np.zeros((d, d))
    for k in range(trials):
        g = gen_sketch(t, d, k).entries
        acc += g.T @ g
    assert np.max(np.abs(acc / trials - np.eye(d))) <= 0.05
