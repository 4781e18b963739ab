import math
import random

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from tcmesh.errors import DegenerateVariance, InsufficientData
from tcmesh.growth import CagrPoint
from tcmesh.stats import (
    ccdf_points,
    fit_ccdf_slope,
    grouped_correlations,
    ols,
    pearson,
    rating_class,
    size_degree_regression,
)
from tcmesh.synth import Stream, draw_in_degrees


def textbook_r(xs, ys):
    n = len(xs)
    sx, sy = math.fsum(xs), math.fsum(ys)
    sxy = math.fsum(x * y for x, y in zip(xs, ys))
    sxx = math.fsum(x * x for x in xs)
    syy = math.fsum(y * y for y in ys)
    return (n * sxy - sx * sy) / math.sqrt((n * sxx - sx * sx) * (n * syy - sy * sy))


def test_pearson_linear():
    xs = [0.5, 1.0, 2.0, 7.0]
    assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0, abs=1e-15)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-15)


def test_pearson_hand_example():
    # sum dx*dy = 5.5, sum dx^2 = 5, sum dy^2 = 8.75
    assert pearson([1, 2, 3, 4], [1, 3, 2, 5]) == pytest.approx(0.8315218406202999, abs=1e-15)
    assert textbook_r([1, 2, 3, 4], [1, 3, 2, 5]) == pytest.approx(0.8315218406202999, abs=1e-15)


def test_pearson_degenerate():
    with pytest.raises(DegenerateVariance):
        pearson([1, 2, 3], [4, 4, 4])
    with pytest.raises(InsufficientData):
        pearson([1], [2])


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=30), st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_affine_invariance(pairs, a, b):
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    assume(np.std(xs) > 1e-3 and np.std(ys) > 1e-3)
    r = pearson(xs, ys)
    assert pearson([a * x + b for x in xs], ys) == pytest.approx(r, abs=1e-9)
    assert pearson(xs, [-y for y in ys]) == pytest.approx(-r, abs=1e-12)
    assert -1.0 <= r <= 1.0


def test_ols_simple():
    assert ols([0, 1, 2], [1, 3, 5]) == pytest.approx((2.0, 1.0))


def test_ccdf_small():
    assert ccdf_points([1, 1, 2]) == [(1, 1.0), (2, 1 / 3)]
    assert ccdf_points([4, 4, 4]) == [(4, 1.0)]


def test_ccdf_matches_counting():
    rng = random.Random(11)
    degrees = [rng.randint(1, 40) for _ in range(200)]
    pts = ccdf_points(degrees)
    for k, c in pts:
        assert c == sum(d >= k for d in degrees) / 200
    assert [k for k, _ in pts] == sorted(set(degrees))
    cs = [c for _, c in pts]
    assert cs[0] == 1.0 and all(a >= b for a, b in zip(cs, cs[1:]))


def test_fit_exact_power_law():
    pts = [(k, k ** -1.3) for k in range(1, 101)]
    fit = fit_ccdf_slope(pts)
    assert abs(fit.slope + 1.3) < 1e-9
    assert fit.density_exponent == pytest.approx(2.3)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_constant():
    fit = fit_ccdf_slope([(k, 0.5) for k in range(1, 10)])
    assert fit.slope == pytest.approx(0.0, abs=1e-15)


def test_fit_window_and_too_few():
    pts = [(k, k ** -2.0) for k in range(1, 50)]
    fit = fit_ccdf_slope(pts, 5, 20)
    assert (fit.k_min, fit.k_max, fit.n_points) == (5, 20, 16)
    with pytest.raises(InsufficientData):
        fit_ccdf_slope(pts, 10, 11)


def test_fit_sampled_power_law():
    degrees = draw_in_degrees(Stream(3), 10_000, 2.3, 160_000)
    fit = fit_ccdf_slope(ccdf_points(degrees), 1, 150)
    assert -1.45 <= fit.slope <= -1.15


def test_regression_exact():
    res, bins = size_degree_regression([(k, float(k)) for k in (1, 2, 3, 5, 8, 13)])
    assert res.slope == pytest.approx(1.0) and res.pearson_r == pytest.approx(1.0)
    assert res.n == 6
    assert [b.log_degree_lo for b in bins] == [0, 1, 2]


def test_regression_constant_sales():
    res, _ = size_degree_regression([(k, 1e6) for k in (1, 2, 4, 8)])
    assert res.slope == pytest.approx(0.0, abs=1e-12)
    assert res.pearson_r is None and res.r_status == "degenerate-variance"


def test_regression_cutoff():
    pairs = [(k, float(k)) for k in (1, 2, 3, 4)] + [(200, 1.0), (500, 1.0)]
    res, bins = size_degree_regression(pairs, degree_cutoff=150)
    assert res.n == 4 and res.slope == pytest.approx(1.0)
    assert sum(b.n for b in bins) == 6
    all_in, _ = size_degree_regression(pairs, degree_cutoff=math.inf)
    lx = [math.log(k) for k, _ in pairs]
    ly = [math.log(s) for _, s in pairs]
    assert all_in.slope == pytest.approx(ols(lx, ly)[0], abs=1e-12)


def test_regression_planted_slope():
    rng = np.random.default_rng(5)
    degrees = draw_in_degrees(Stream(5), 3000, 2.3, 48_000)
    pairs = [(k, math.exp(12 + 0.18 * math.log(k) + rng.normal(0, 0.5))) for k in degrees]
    res, _ = size_degree_regression(pairs)
    assert abs(res.slope - 0.18) <= 0.05


def test_regression_too_few():
    with pytest.raises(InsufficientData):
        size_degree_regression([(1, 1.0), (2, 2.0)])


@pytest.mark.parametrize("rating, cls", [(1, "A"), (3, "A"), (4, "B"), (6, "B"), (7, "C"), (9, "C")])
def test_rating_class(rating, cls):
    assert rating_class(rating) == cls


def test_rating_class_out_of_range():
    with pytest.raises(ValueError):
        rating_class(0)


def _cp(x, y, cls="A", size="small", sector="D"):
    return CagrPoint("s", x, y, cls, size, sector)


def test_grouped_single_perfect():
    table = grouped_correlations([_cp(x, 2 * x) for x in (0.1, 0.2, 0.4)], "rating")
    assert table.get("A").pearson_r == pytest.approx(1.0)


def test_grouped_insufficient():
    pts = [_cp(x, x * x) for x in (1, 2, 3, 4, 5)] + [_cp(1, 1, cls="B")]
    table = grouped_correlations(pts, "rating")
    assert table.get("A").n == 5 and table.get("A").status == "ok"
    assert table.get("B").status == "insufficient" and table.get("B").pearson_r is None


def test_grouped_keys_and_partition():
    pts = [_cp(random.random(), random.random(), cls=c, size=s, sector=sec)
           for c in "ABC" for s in ("small", "large") for sec in ("D2891", "G") for _ in range(3)]
    for g in ("rating", "rating-size", "sector"):
        table = grouped_correlations(pts, g)
        assert sum(r.n for r in table.rows) == len(pts)
    keys = [r.key for r in grouped_correlations(pts, "rating-size").rows]
    assert "A/large" in keys and len(keys) == 6
    assert [r.key for r in grouped_correlations(pts, "sector").rows] == ["D", "G"]
    with pytest.raises(ValueError):
        grouped_correlations(pts, "color")
