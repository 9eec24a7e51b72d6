"""Instance generation with certified distances.

All families emit integer-grid weights (|w_i| <= 4095) and half-integer
thresholds, so |w.x - theta| >= 1/2 on every point: evaluations are exact in
every backend and no instance sits near its own boundary.  Far instances
ship with a certified distance: exact counting for n <= 20, Monte-Carlo with
a stated radius above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .oracle import LTFSpec
from .rng import SplitRng
from .truth import (
    DistanceReport,
    WeightProfile,
    dist_ltf_to_monotone_exact,
    dist_ltf_to_monotone_mc,
    exact_mean,
)

MAX_WEIGHT = 4095.0
WEIGHT_SCALE = 16.0

MONOTONE_RANDOM = "monotone-random"
SIGNED_MAJORITY = "signed-majority"
PLANTED_NEGATIVE_MASS = "planted-negative-mass"
HEAVY_COORDINATE = "heavy-coordinate"
ADVERSARIAL = "adversarial"

FAMILY_KINDS = (MONOTONE_RANDOM, SIGNED_MAJORITY, PLANTED_NEGATIVE_MASS,
                HEAVY_COORDINATE, ADVERSARIAL)


@dataclass(frozen=True)
class InstanceFamily:
    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family {self.kind!r}")
        if self.n < 2:
            raise ValueError("need n >= 2")


@dataclass(frozen=True)
class GeneratedInstance:
    spec: LTFSpec
    kind: str
    distance: DistanceReport
    profile: WeightProfile
    attempts: int

    @property
    def known_monotone(self) -> bool:
        return bool(np.all(self.spec.weights >= 0))


def _grid_magnitudes(gen: np.random.Generator, n: int,
                     scale: float = WEIGHT_SCALE) -> np.ndarray:
    """Positive integer weights, roughly half-normal with the given scale."""
    w = np.round(np.abs(gen.standard_normal(n)) * scale) + 1.0
    return np.minimum(w, MAX_WEIGHT)


def _half_integer(x: float) -> float:
    return math.floor(x) + 0.5


def _certify(spec: LTFSpec, rng: SplitRng, mc_radius: float,
             mc_delta: float = 0.01) -> DistanceReport:
    if spec.n <= 20:
        return dist_ltf_to_monotone_exact(spec)
    samples = int(math.ceil(math.log(2.0 / mc_delta) / (2.0 * mc_radius ** 2)))
    return dist_ltf_to_monotone_mc(spec, samples, mc_delta,
                                   rng.child("certify").generator)


def _mc_mean(spec: LTFSpec, gen: np.random.Generator,
             samples: int = 50_000) -> float:
    if spec.n <= 20:
        return exact_mean(spec)
    from . import bits
    from .oracle import _LTFEvaluator
    pts = bits.random_packed(gen, samples, spec.n)
    return float(_LTFEvaluator(spec)(pts).astype(np.float64).mean())


def generate(family: InstanceFamily, rng: SplitRng,
             mc_radius: float = 0.005) -> GeneratedInstance:
    """Draw one instance of the family, with a certified distance report."""
    maker = {
        MONOTONE_RANDOM: _make_monotone_random,
        SIGNED_MAJORITY: _make_signed_majority,
        PLANTED_NEGATIVE_MASS: _make_planted_negative_mass,
        HEAVY_COORDINATE: _make_heavy_coordinate,
        ADVERSARIAL: _make_adversarial,
    }[family.kind]
    return maker(family, rng, mc_radius)


def _make_monotone_random(family, rng, mc_radius):
    gen = rng.child("draw").generator
    n = family.n
    w = _grid_magnitudes(gen, n)
    spread = float(np.linalg.norm(w))
    theta = _half_integer(float(gen.uniform(-0.5, 0.5)) * spread)
    spec = LTFSpec(w, theta)
    dist = DistanceReport("drop-negative-exact", 0.0, 0, 1 << n)
    return GeneratedInstance(spec, family.kind, dist,
                             WeightProfile.from_weights(w), 1)


def _make_signed_majority(family, rng, mc_radius):
    gen = rng.child("draw").generator
    n, k = family.n, int(family.params.get("k", 1))
    if not 0 <= k <= n:
        raise ValueError("k out of range")
    w = np.ones(n)
    flip = gen.choice(n, size=k, replace=False)
    w[flip] = -1.0
    spec = LTFSpec(w, 0.0)
    return GeneratedInstance(spec, family.kind, _certify(spec, rng, mc_radius),
                             WeightProfile.from_weights(w), 1)


def _make_planted_negative_mass(family, rng, mc_radius):
    n = family.n
    target = float(family.params.get("lambda_target", 0.25))
    max_mean = float(family.params.get("max_abs_mean", 0.9))
    for attempt in range(64):
        gen = rng.child("draw", attempt).generator
        w = _grid_magnitudes(gen, n)
        order = gen.permutation(n)
        total = float((w * w).sum())
        acc = 0.0
        flip = []
        for i in order:
            if acc >= target * total:
                break
            flip.append(i)
            acc += float(w[i]) ** 2
        w[flip] *= -1.0
        frac = WeightProfile.from_weights(w).neg_fraction
        if not (0.9 * target <= frac <= 1.1 * target):
            continue
        spec = LTFSpec(w, 0.5)
        if abs(_mc_mean(spec, rng.child("balance", attempt).generator)) > max_mean:
            continue
        return GeneratedInstance(spec, family.kind,
                                 _certify(spec, rng, mc_radius),
                                 WeightProfile.from_weights(w), attempt + 1)
    raise RuntimeError("could not hit the negative-mass target")


def _make_heavy_coordinate(family, rng, mc_radius):
    gen = rng.child("draw").generator
    n = family.n
    heavy = float(family.params.get("heavy", 8.0))
    sign = float(family.params.get("sign", -1.0))
    w = np.ones(n)
    pos = int(gen.integers(0, n))
    w[pos] = sign * min(abs(heavy), MAX_WEIGHT)
    spec = LTFSpec(w, 0.0)
    return GeneratedInstance(spec, family.kind, _certify(spec, rng, mc_radius),
                             WeightProfile.from_weights(w), 1)


def _make_adversarial(family, rng, mc_radius):
    """Heavy-tailed weights, a sizeable negative subset, and a threshold
    pushed toward one tail so the function is noticeably biased."""
    gen = rng.child("draw").generator
    n = family.n
    neg_frac = float(family.params.get("neg_coordinate_frac", 0.3))
    bias = float(family.params.get("bias", 0.6))
    w = np.minimum(np.round(np.exp(gen.normal(1.0, 1.2, size=n))) + 1.0,
                   MAX_WEIGHT)
    flip = gen.choice(n, size=max(1, int(neg_frac * n)), replace=False)
    w[flip] *= -1.0
    theta = _half_integer(bias * float(np.linalg.norm(w)))
    spec = LTFSpec(w, theta)
    return GeneratedInstance(spec, family.kind, _certify(spec, rng, mc_radius),
                             WeightProfile.from_weights(w), 1)
