import math

import numpy as np
import pytest

from monotest.oracle import LTFSpec, truth_table
from monotest.rng import generator_for
from monotest.truth import (
    WeightProfile,
    check_distance_lower_bound,
    check_negative_mass_lower_bound,
    check_restriction_preserves_distance,
    classify_non_monotone,
    dist_ltf_to_monotone_exact,
    dist_ltf_to_monotone_mc,
    dist_to_monotone_matching,
    drop_negative_weights,
    exact_mean,
    min_boundary_gap,
)


def spec_of(w, theta=0.0):
    return LTFSpec(np.asarray(w, dtype=np.float64), theta)


def random_grid_spec(rng, n, scale=8):
    """Integer-grid weights with a half-integer threshold: no boundary points."""
    w = np.round(rng.standard_normal(n) * scale)
    w[w == 0] = 1.0
    theta = float(rng.integers(-2 * scale, 2 * scale)) + 0.5
    return LTFSpec(w, theta)


# ---------------------------------------------------------------------------
# drop_negative_weights


def test_drop_negative_basic():
    g = drop_negative_weights(spec_of([1.0, -1.0]))
    assert np.array_equal(g.weights, [1.0, 0.0]) and g.theta == 0.0
    g2 = drop_negative_weights(spec_of([2.0, 3.0], 1.0))
    assert np.array_equal(g2.weights, [2.0, 3.0])


def test_drop_all_negative_gives_constant():
    g = drop_negative_weights(spec_of([-1.0, -2.0]))
    assert np.all(truth_table(g) == 1)  # sign(0 - 0) = +1 on every point


# ---------------------------------------------------------------------------
# matching oracle


def test_matching_monotone_is_zero():
    assert dist_to_monotone_matching(truth_table(spec_of([1, 2, 1]))).value == 0.0


def test_matching_negated_dictator_half():
    rep = dist_to_monotone_matching(truth_table(spec_of([-1.0])))
    assert (rep.numerator, rep.denominator) == (1, 2)


def brute_force_dist_to_monotone(table):
    """Minimum disagreement with any monotone function, by enumeration."""
    n = table.size.bit_length() - 1
    size = 1 << n
    best = size
    comparable = [(x, y) for y in range(size) for x in range(size)
                  if x != y and (x & y) == x]
    for cand in range(1 << size):
        g = np.array([1 if (cand >> i) & 1 else -1 for i in range(size)])
        if any(g[x] > g[y] for x, y in comparable):
            continue
        best = min(best, int(np.count_nonzero(g != table)))
    return best


def test_matching_equals_brute_force_n3():
    # negated-coordinate majority of 3, checked against enumeration of all
    # monotone functions on 3 variables
    spec = spec_of([-1.0, 1.0, 1.0])
    table = truth_table(spec)
    assert dist_to_monotone_matching(table).numerator == \
        brute_force_dist_to_monotone(table)


def test_matching_equals_brute_force_random_tables():
    rng = generator_for(99, "bf")
    for _ in range(8):
        table = (rng.integers(0, 2, size=8).astype(np.int8) * 2 - 1)
        assert dist_to_monotone_matching(table).numerator == \
            brute_force_dist_to_monotone(table)


# ---------------------------------------------------------------------------
# exact weight-based oracle and the cross-oracle identity


def test_exact_monotone_zero():
    assert dist_ltf_to_monotone_exact(spec_of([1, 1, 1])).value == 0.0


def test_exact_equals_matching_small():
    spec = spec_of([1.0, 1.0, -1.0])
    a = dist_ltf_to_monotone_exact(spec)
    b = dist_to_monotone_matching(truth_table(spec))
    assert (a.numerator, a.denominator) == (b.numerator, b.denominator)


def test_cross_oracle_sweep_random():
    rng = generator_for(7, "sweep")
    for _ in range(60):
        n = int(rng.integers(2, 11))
        spec = random_grid_spec(rng, n)
        a = dist_ltf_to_monotone_exact(spec)
        b = dist_to_monotone_matching(truth_table(spec))
        assert a.numerator == b.numerator != None  # noqa: E711
        assert a.value <= 0.5


def test_distance_never_exceeds_half():
    rng = generator_for(8, "half")
    for _ in range(40):
        n = int(rng.integers(1, 12))
        spec = random_grid_spec(rng, n)
        assert dist_ltf_to_monotone_exact(spec).value <= 0.5


# ---------------------------------------------------------------------------
# Monte-Carlo distance


def test_mc_distance_close_to_exact():
    spec = spec_of([1.0, 1.0, -1.0])
    exact = dist_ltf_to_monotone_exact(spec).value
    rng = generator_for(21, "mc")
    rep = dist_ltf_to_monotone_mc(spec, 100_000, 0.01, rng)
    assert abs(rep.value - exact) <= rep.radius


def test_mc_distance_monotone_near_zero():
    rng = generator_for(22, "mc0")
    rep = dist_ltf_to_monotone_mc(spec_of([1, 2, 3, 4]), 50_000, 0.05, rng)
    assert rep.value <= rep.radius


def test_mc_distance_within_radius_frequency():
    # nominal confidence 1-delta; the empirical miss rate over seeded runs
    # must stay within twice the nominal failure budget
    spec = spec_of([3.0, 1.0, -2.0, 1.0, -1.0, 2.0], 0.5)
    exact = dist_ltf_to_monotone_exact(spec).value
    delta, runs = 0.2, 50
    misses = 0
    for s in range(runs):
        rep = dist_ltf_to_monotone_mc(spec, 2_000, delta,
                                      generator_for(s, "mc-freq"))
        misses += abs(rep.value - exact) > rep.radius
    assert misses <= 2 * delta * runs


def test_mc_distance_seed_stability():
    spec = spec_of(np.concatenate([np.ones(100), [-50.0]]), 0.5)
    vals = []
    for s in range(5):
        rep = dist_ltf_to_monotone_mc(spec, 50_000, 0.05, generator_for(s, "mcs"))
        vals.append(rep.value)
    radius = math.sqrt(math.log(2 / 0.05) / (2 * 50_000))
    assert max(vals) - min(vals) <= 4 * radius


# ---------------------------------------------------------------------------
# profile and classification


def test_weight_profile_fields():
    p = WeightProfile.from_weights(np.array([-1.0, 1.0, 1.0, 1.0]))
    assert p.pos == 3.0 and p.neg == 1.0
    assert p.neg_fraction == 0.25
    assert p.regularity == pytest.approx(0.5)


def test_profile_zero_weights_count_positive():
    p = WeightProfile.from_weights(np.array([0.0, -2.0]))
    assert p.pos == 0.0 and p.neg == 4.0 and p.neg_fraction == 1.0


def test_classify_no_negative_weights():
    cls = classify_non_monotone(spec_of(np.ones(16)), 0.9, 0.5, 1e-6)
    assert not cls.significant_negative and not cls.is_non_monotone


def test_classify_enumerated_example():
    # sign(-x1 + x2 + x3 + x4): regularity 1/2, neg fraction 1/4, E[f] = 6/16
    cls = classify_non_monotone(spec_of([-1, 1, 1, 1]), 0.6, 0.5, 0.2)
    assert cls.profile.regularity == pytest.approx(0.5)
    assert cls.profile.neg_fraction == pytest.approx(0.25)
    assert cls.mean == pytest.approx(6 / 16)
    assert cls.weight_regular and cls.significant_negative and cls.balanced
    assert cls.is_non_monotone


def test_classify_fully_biased_fails_balance():
    cls = classify_non_monotone(spec_of([1.0], 10.0), 0.9, 0.5, 0.0)
    assert cls.mean == -1.0 and not cls.balanced and not cls.is_non_monotone


def test_exact_mean_matches_table():
    rng = generator_for(17, "mean")
    for _ in range(20):
        n = int(rng.integers(1, 10))
        spec = random_grid_spec(rng, n)
        assert exact_mean(spec) == pytest.approx(truth_table(spec).mean())


def test_min_boundary_gap_half_integer_theta():
    rng = generator_for(18, "gap")
    for _ in range(10):
        spec = random_grid_spec(rng, 8)
        assert min_boundary_gap(spec) >= 0.5


# ---------------------------------------------------------------------------
# structural checks


def test_restriction_average_single_var():
    chk = check_restriction_preserves_distance(spec_of([1, 1, -1]), [0])
    assert chk.status == "pass"


def test_restriction_average_empty_set():
    chk = check_restriction_preserves_distance(spec_of([1, -2, 3], 0.5), [])
    assert chk.status == "pass"


def test_restriction_average_random_sweep():
    rng = generator_for(31, "restrict-avg")
    for _ in range(30):
        n = int(rng.integers(2, 10))
        spec = random_grid_spec(rng, n)
        nonneg = np.flatnonzero(spec.weights >= 0)
        if nonneg.size == 0:
            continue
        take = min(nonneg.size, int(rng.integers(1, 5)))
        s_vars = rng.choice(nonneg, size=take, replace=False)
        assert check_restriction_preserves_distance(spec, s_vars).status == "pass"


def test_restriction_rejects_negative_vars():
    with pytest.raises(ValueError):
        check_restriction_preserves_distance(spec_of([-1, 1]), [0])


def test_negative_mass_bound_vacuous_when_not_regular():
    # at n=4 regularity >= 1/2 > eps/16 for any eps <= 1/2
    chk = check_negative_mass_lower_bound(spec_of([1, 1, -1, 1]), 0.2)
    assert chk.status == "vacuous"


def test_distance_lower_bound_modes():
    spec = spec_of([-1, 1, 1, 1])
    # hypotheses intentionally not satisfiable at this size: vacuous
    out = check_distance_lower_bound(spec, tau=0.5, gamma=0.5, lam=0.25)
    assert out.status == "vacuous"  # tau > sqrt(lam)/16
    # a satisfied-hypothesis case would need regularity <= sqrt(lam)/16,
    # impossible for n=4; verify the classifier gate too
    out2 = check_distance_lower_bound(spec, tau=0.02, gamma=0.5, lam=0.25)
    assert out2.status == "vacuous"
