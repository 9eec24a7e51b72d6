import math

import numpy as np
import pytest

from monotest import subroutines
from monotest.oracle import (
    LTFSpec,
    OracleHandle,
    Restriction,
    verify_certificate,
)
from monotest.rng import SplitRng
from monotest.schedule import build_schedule
from monotest.spectral import exact_spectrum
from monotest.subroutines import (
    FAIL,
    NEGATIVE,
    POSITIVE,
    check_weight_positive,
    edge_tester,
    find_balanced_restriction,
    find_hi_influence_vars,
    maintain_regular_and_balanced,
)


def planted_heavy(n, heavy=8.0, sign=1.0):
    """One dominant coordinate, the rest unit weights."""
    w = np.ones(n)
    w[0] = sign * heavy
    return LTFSpec(w, 0.0)


def rng_at(seed, *path):
    return SplitRng(seed, path)


# ---------------------------------------------------------------------------
# find_hi_influence_vars


def test_influence_search_lone_dictator():
    spec = LTFSpec(np.array([1.0] + [0.0] * 7), 0.0)
    f = OracleHandle.for_spec(spec)
    out = find_hi_influence_vars(f, Restriction.all_stars(8), 0.5, 0.1,
                                 rng_at(1, "dict"))
    assert not out.failed
    assert list(out.variables) == [0]
    assert out.estimator_calls <= out.call_cap


def test_influence_search_majority51_empty():
    # every coefficient ~0.112 < tau/2 = 0.25
    f = OracleHandle.for_spec(LTFSpec(np.ones(51), 0.0))
    out = find_hi_influence_vars(f, Restriction.all_stars(51), 0.5, 0.1,
                                 rng_at(2, "maj51"))
    assert not out.failed and out.variables.size == 0


def test_influence_search_planted_gap_n17():
    spec = planted_heavy(17)
    sp = exact_spectrum(spec)
    assert abs(sp.degree1[0]) >= 0.3
    assert np.max(np.abs(sp.degree1[1:])) < 0.15
    f = OracleHandle.for_spec(spec)
    out = find_hi_influence_vars(f, Restriction.all_stars(17), 0.3, 0.05,
                                 rng_at(3, "plant17"))
    assert list(out.variables) == [0]
    assert out.estimator_calls <= out.call_cap == math.ceil(
        8 * math.log2(17) / 0.3 ** 2)


def test_influence_search_respects_restriction():
    # under rho fixing the heavy coordinate, nothing clears the threshold
    spec = planted_heavy(17)
    f = OracleHandle.for_spec(spec)
    rho = Restriction.fixing(17, {0: 1})
    out = find_hi_influence_vars(f, rho, 0.5, 0.05, rng_at(4, "fixed"))
    assert out.variables.size == 0


def test_influence_search_cap_trips_on_broken_estimator(monkeypatch):
    # force every estimate high so no block is ever pruned
    from monotest.spectral import SpectralEstimate

    def always_heavy(view, part, eta, delta, rng, n_dummy=0):
        return SpectralEstimate(1.0, eta, delta, 0)

    monkeypatch.setattr(subroutines, "estimate_sum_of_squares", always_heavy)
    f = OracleHandle.for_spec(LTFSpec(np.ones(64), 0.5))
    # with nothing ever pruned the search needs 2*63 calls, above the cap
    out = find_hi_influence_vars(f, Restriction.all_stars(64), 0.7, 0.1,
                                 rng_at(5, "trip"))
    assert out.failed
    assert out.estimator_calls == out.call_cap  # completed calls only


def test_influence_search_single_variable_returned_unconditionally():
    # a single free variable is never split, hence never estimated: the
    # procedure returns it as-is and the weight-sign check downstream is the
    # guard against it being uninfluential
    f = OracleHandle.for_spec(LTFSpec(np.array([1.0, 1.0]), 0.0))
    rho = Restriction.fixing(2, {1: 1})
    out = find_hi_influence_vars(f, rho, 0.5, 0.1, rng_at(15, "single"))
    assert list(out.variables) == [0]
    assert out.estimator_calls == 0


def test_influence_search_empty_domain():
    f = OracleHandle.for_spec(LTFSpec(np.ones(4), 0.5))
    rho = Restriction(np.ones(4, dtype=np.int8))
    out = find_hi_influence_vars(f, rho, 0.5, 0.1, rng_at(6, "empty"))
    assert not out.failed and out.variables.size == 0 and out.queries_used == 0


# ---------------------------------------------------------------------------
# check_weight_positive


def test_weight_sign_negated_dictator():
    f = OracleHandle.for_spec(LTFSpec(np.array([-1.0]), 0.0))
    out = check_weight_positive(f, Restriction.all_stars(1), 0, 0.5, 0.1,
                                rng_at(7, "negdict"))
    assert out.decision == NEGATIVE
    assert verify_certificate(f, out.certificate)


def test_weight_sign_positive_rate():
    spec = LTFSpec(np.array([1.0, 0.1]), 0.0)
    hits = 0
    for t in range(100):
        f = OracleHandle.for_spec(spec)
        out = check_weight_positive(f, Restriction.all_stars(2), 0, 0.5, 0.05,
                                    rng_at(t, "pos"))
        hits += out.decision == POSITIVE
        assert out.decision != NEGATIVE  # sign errors never happen
    assert hits >= 95


def test_weight_sign_zero_influence_always_fails():
    spec = LTFSpec(np.array([1.0, 0.0]), 0.0)
    for t in range(20):
        f = OracleHandle.for_spec(spec)
        out = check_weight_positive(f, Restriction.all_stars(2), 1, 0.5, 0.1,
                                    rng_at(t, "zero"))
        assert out.decision == FAIL


def test_weight_sign_consistency_across_seeds():
    spec = LTFSpec(np.array([3.0, -2.0, 1.0, 1.0, -1.0]), 0.5)
    seen = {i: set() for i in range(5)}
    for t in range(30):
        for i in range(5):
            f = OracleHandle.for_spec(spec)
            out = check_weight_positive(f, Restriction.all_stars(5), i,
                                        0.3, 0.1, rng_at(t, "consist", i))
            if out.decision != FAIL:
                seen[i].add(out.decision)
    for i, decisions in seen.items():
        assert len(decisions) <= 1  # unate: orientations never mix


def test_weight_sign_respects_restriction_and_counts_queries():
    spec = LTFSpec(np.array([2.0, -5.0, 1.0]), 0.5)
    f = OracleHandle.for_spec(spec)
    rho = Restriction.fixing(3, {0: -1})
    out = check_weight_positive(f, rho, 1, 0.4, 0.1, rng_at(9, "restr"))
    assert out.decision == NEGATIVE
    assert f.query_count == out.queries_used
    base = out.certificate.base_point
    assert base[0] == -1  # consistent with rho
    assert verify_certificate(f, out.certificate)
    with pytest.raises(ValueError):
        check_weight_positive(f, rho, 0, 0.4, 0.1, rng_at(9, "bad"))


# ---------------------------------------------------------------------------
# edge tester


def test_edge_tester_one_sided_on_monotone():
    rng = np.random.default_rng(11)
    for trial in range(30):
        n = int(rng.integers(2, 40))
        w = np.round(np.abs(rng.standard_normal(n)) * 8) + 1.0
        f = OracleHandle.for_spec(LTFSpec(w, float(rng.integers(-8, 8)) + 0.5))
        v = edge_tester(f, 0.2, 0.1, rng_at(trial, "mono-edge"))
        assert v.is_monotone and v.diagnostic == "edge:pass"


def test_edge_tester_negated_dictator_detection_rate():
    spec = LTFSpec(np.array([-1.0]), 0.0)
    hits = 0
    for t in range(100):
        f = OracleHandle.for_spec(spec)
        v = edge_tester(f, 0.2, 0.1, rng_at(t, "neg-edge"))
        if not v.is_monotone:
            assert verify_certificate(f, v.certificate)
            hits += 1
    assert hits >= 90


def test_edge_tester_on_restricted_view():
    # pinning x0=+1 in sign(4 x0 + x1 - x2 - 4) leaves sign(x1 - x2), which
    # has anti-monotone edges in direction 2
    spec = LTFSpec(np.array([4.0, 1.0, -1.0]), 4.0)
    root = OracleHandle.for_spec(spec)
    from monotest.oracle import restrict
    view = restrict(root, Restriction.fixing(3, {0: 1}))
    v = edge_tester(view, 0.3, 0.05, rng_at(13, "view-edge"))
    assert not v.is_monotone
    assert v.certificate.coordinate == 2
    assert v.certificate.base_point[0] == 1
    assert verify_certificate(root, v.certificate)


# ---------------------------------------------------------------------------
# find_balanced_restriction


def majority_shift_mean(k, threshold):
    """Exact E[sign(sum of k fair +-1 >= threshold)] by binomial counting."""
    count = sum(math.comb(k, j) for j in range(k + 1) if 2 * j - k >= threshold)
    return 2 * count / 2 ** k - 1


def test_balance_search_accepts_balanced_extension():
    # an odd number of surviving majority variables admits perfectly balanced
    # extensions (fixing an even number leaves a probability atom at the
    # threshold, so the size of a_vars matters here)
    n = 16
    spec = LTFSpec(np.ones(n), 0.0)
    sched = build_schedule(n, 0.25)
    rng = np.random.default_rng(17)
    accepted = 0
    good = 0
    for t in range(20):
        f = OracleHandle.for_spec(spec)
        rho_t = Restriction.all_stars(n)
        a_vars = np.sort(rng.choice(n, size=7, replace=False))
        rho_p = find_balanced_restriction(f, rho_t, a_vars, 0.25, sched,
                                          rng_at(t, "fbr"))
        if rho_p is None:
            continue
        accepted += 1
        assert rho_p.extends(rho_t)
        assert np.array_equal(rho_p.support(), a_vars)
        shift = int(rho_p.assignment[a_vars].sum())
        if abs(majority_shift_mean(n - 7, -shift)) <= 0.04:
            good += 1
    assert accepted >= 15
    assert good >= 0.95 * accepted


def test_balance_search_majority64():
    # same structure at n=64 through the byte-table evaluation path
    spec = LTFSpec(np.ones(64), 0.0)
    sched = build_schedule(64, 0.25)
    f = OracleHandle.for_spec(spec)
    a_vars = np.arange(33)
    rho_p = find_balanced_restriction(f, Restriction.all_stars(64), a_vars,
                                      0.25, sched, rng_at(3, "fbr64"))
    assert rho_p is not None
    shift = int(rho_p.assignment[a_vars].sum())
    assert abs(majority_shift_mean(31, -shift)) <= 0.04


def test_balance_search_gives_up_on_constant():
    f = OracleHandle.for_function(
        lambda pm: np.ones(pm.shape[0], dtype=np.int8), 16)
    sched = build_schedule(16, 0.5)
    rho = find_balanced_restriction(f, Restriction.all_stars(16),
                                    np.arange(8), 0.5, sched,
                                    rng_at(23, "const"))
    assert rho is None


# ---------------------------------------------------------------------------
# maintain_regular_and_balanced


def test_maintain_rejects_planted_negative():
    spec = planted_heavy(33, heavy=8.0, sign=-1.0)
    sched = build_schedule(33, 0.1)
    hits = 0
    for t in range(30):
        f = OracleHandle.for_spec(spec)
        out = maintain_regular_and_balanced(f, Restriction.all_stars(33),
                                            0.1, sched, rng_at(t, "mrb"))
        if isinstance(out, subroutines.Verdict) and not out.is_monotone:
            assert verify_certificate(f, out.certificate)
            hits += 1
    assert hits >= 24  # contract asks >= 80%


def test_maintain_monotone_never_rejects_and_eta_support():
    spec = LTFSpec(np.ones(32), 0.5)
    sched = build_schedule(32, 0.1)
    for t in range(10):
        f = OracleHandle.for_spec(spec)
        out = maintain_regular_and_balanced(f, Restriction.all_stars(32),
                                            0.1, sched, rng_at(t, "mrb-mono"))
        if isinstance(out, subroutines.Verdict):
            assert out.is_monotone
        else:
            assert isinstance(out, Restriction)
            # support is exactly the discovered high-influence set (possibly
            # empty), inside the free coordinates
            assert set(out.support()) <= set(range(32))


def test_maintain_heavy_positive_fixes_it():
    # the heavy positive coordinate must be discovered, certified positive,
    # and end up in the support of the returned extension
    spec = planted_heavy(33, heavy=8.0, sign=1.0)
    sched = build_schedule(33, 0.1)
    fixed = 0
    for t in range(10):
        f = OracleHandle.for_spec(spec)
        out = maintain_regular_and_balanced(f, Restriction.all_stars(33),
                                            0.1, sched, rng_at(t, "mrb-pos"))
        if isinstance(out, Restriction) and 0 in set(out.support()):
            fixed += 1
    assert fixed >= 8
