import json

import numpy as np

from monotest.generators import (
    ADVERSARIAL,
    HEAVY_COORDINATE,
    MONOTONE_RANDOM,
    PLANTED_NEGATIVE_MASS,
    SIGNED_MAJORITY,
    InstanceFamily,
    generate,
)
from monotest.harness import (
    SuiteConfig,
    records_csv_deterministic_view,
    records_to_csv,
    run_suite,
    wilson_interval,
)
from monotest.oracle import LTFSpec
from monotest.rng import SplitRng
from monotest.truth import WeightProfile, dist_ltf_to_monotone_exact


def rng_at(seed, *path):
    return SplitRng(seed, path)


# ---------------------------------------------------------------------------
# generators


def test_monotone_random_distance_zero():
    inst = generate(InstanceFamily(MONOTONE_RANDOM, 300), rng_at(1, "g"))
    assert inst.known_monotone
    assert inst.distance.value == 0.0
    assert np.all(inst.spec.weights >= 1.0)


def test_signed_majority_exact_distance():
    inst = generate(InstanceFamily(SIGNED_MAJORITY, 9, {"k": 1}), rng_at(2, "g"))
    assert inst.distance.method == "drop-negative-exact"
    expect = dist_ltf_to_monotone_exact(inst.spec)
    assert inst.distance.numerator == expect.numerator
    assert inst.distance.value > 0.1


def test_planted_negative_mass_hits_target():
    fam = InstanceFamily(PLANTED_NEGATIVE_MASS, 4096, {"lambda_target": 0.25})
    inst = generate(fam, rng_at(3, "g"))
    frac = WeightProfile.from_weights(inst.spec.weights).neg_fraction
    assert 0.225 <= frac <= 0.275
    assert inst.distance.method == "drop-negative-mc"
    assert inst.distance.radius <= 0.005 + 1e-12


def test_heavy_coordinate_has_one_negative():
    inst = generate(InstanceFamily(HEAVY_COORDINATE, 33, {"heavy": 8.0}),
                    rng_at(4, "g"))
    w = inst.spec.weights
    assert np.count_nonzero(w < 0) == 1
    assert np.min(w) == -8.0


def test_adversarial_is_biased_and_mixed_sign():
    inst = generate(InstanceFamily(ADVERSARIAL, 18), rng_at(5, "g"))
    assert np.any(inst.spec.weights < 0)
    assert inst.spec.theta > 0


def test_generation_deterministic():
    fam = InstanceFamily(PLANTED_NEGATIVE_MASS, 64, {"lambda_target": 0.2})
    a = generate(fam, rng_at(9, "g"))
    b = generate(fam, rng_at(9, "g"))
    assert np.array_equal(a.spec.weights, b.spec.weights)
    assert a.spec.theta == b.spec.theta


def test_instance_file_roundtrip(tmp_path):
    inst = generate(InstanceFamily(MONOTONE_RANDOM, 12), rng_at(6, "g"))
    path = tmp_path / "inst.json"
    inst.spec.dump(path)
    loaded = LTFSpec.load(path)
    assert np.array_equal(loaded.weights, inst.spec.weights)
    assert loaded.theta == inst.spec.theta
    raw = json.loads(path.read_text())
    assert set(raw) == {"n", "weights", "theta"}


# ---------------------------------------------------------------------------
# suites


def small_suite(seed=11, count=6, threads=1):
    fam = InstanceFamily(SIGNED_MAJORITY, 25, {"k": 6})
    return SuiteConfig(family=fam, count=count, eps=0.05, master_seed=seed,
                       threads=threads)


def test_suite_detects_and_verifies():
    records, summary = run_suite(small_suite())
    assert summary["trials"] == 6
    assert not summary["hard_invariant_violation"]
    assert summary["detection_rate"] >= 0.5
    for rec in records:
        if rec.verdict == "non-monotone":
            assert rec.certificate_ok is True
        assert rec.queries_total == (rec.queries_rb + rec.queries_main
                                     + rec.queries_edge)


def test_suite_monotone_no_false_alarms():
    fam = InstanceFamily(MONOTONE_RANDOM, 40)
    config = SuiteConfig(family=fam, count=8, eps=0.1, master_seed=3)
    records, summary = run_suite(config)
    assert summary["rejections"] == 0
    assert summary["false_alarms"] == []


def test_suite_csv_deterministic_modulo_walltime():
    a_records, _ = run_suite(small_suite(threads=1))
    b_records, _ = run_suite(small_suite(threads=2))
    a = records_csv_deterministic_view(records_to_csv(a_records))
    b = records_csv_deterministic_view(records_to_csv(b_records))
    assert a == b
    header = records_to_csv(a_records).splitlines()[0]
    assert header == ("family,n,epsilon,seed,verdict,diagnostic,"
                      "queries_total,queries_rb,queries_main,queries_edge,"
                      "wall_ms,distance,distance_method")


def test_wilson_interval_sane():
    lo, hi = wilson_interval(45, 50)
    assert 0.78 <= lo <= 0.9 <= hi <= 0.97
    assert wilson_interval(0, 0) == (0.0, 1.0)
