"""Derived parameters for the two-phase tester.

Every quantity is recomputed from (n, eps, constants); nothing is hand-
entered.  Two profiles ship:

* "theoretical": the literal formulas with large constants (100).  The
  resulting sample sizes are astronomically beyond any executable budget;
  the profile exists for inspection and for unit-level dry runs with mocked
  estimators, and the schedule flags itself as such.
* "practical": small constants (2) plus floors that keep every derived
  accuracy, threshold, and round count at an executable scale.  Floors only
  ever raise a value.  Raw formula values are kept alongside the effective
  ones so logs show both.

Throughout, log means log base 2 (it only enters loop caps and confidence
splits), except the ln(...) factors written explicitly in the formulas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional

PROFILE_PRACTICAL = "practical"
PROFILE_THEORETICAL = "theoretical"


@dataclass(frozen=True)
class ScheduleConstants:
    """The "large enough" constants and the profile's executability floors."""

    c_rb: float      # regularize-and-balance rounds / parameter scale
    c_m: float       # maintain-phase scale
    c_br: float      # balanced-restriction rounds scale
    c_eps: float     # final edge-test accuracy scale
    tau_floor: Optional[float] = None        # weight-regularity target
    delta_floor: Optional[float] = None      # confidence parameters
    influence_floor: Optional[float] = None  # high-influence thresholds
    estimator_delta_floor: Optional[float] = None  # per-call confidences
    eps_prime_floor: Optional[float] = None  # edge-tester accuracy
    round_cap: Optional[int] = None          # sampling-loop iteration cap


THEORETICAL_CONSTANTS = ScheduleConstants(
    c_rb=100.0, c_m=100.0, c_br=100.0, c_eps=100.0)

PRACTICAL_CONSTANTS = ScheduleConstants(
    c_rb=2.0, c_m=2.0, c_br=2.0, c_eps=2.0,
    tau_floor=1e-3, delta_floor=1e-3,
    influence_floor=0.5, estimator_delta_floor=1e-2,
    eps_prime_floor=0.2, round_cap=256)


def _floored(raw: float, floor: Optional[float]) -> float:
    return raw if floor is None else max(raw, floor)


def _capped_rounds(raw: float, cap: Optional[int]) -> int:
    rounds = int(math.ceil(raw))
    return rounds if cap is None else min(rounds, cap)


@dataclass(frozen=True)
class ParameterSchedule:
    profile: str
    n: int
    eps: float
    eps_requested: float
    log2n: float
    constants: ScheduleConstants

    # global targets
    lam: float                 # eps^2 / (36 ln(12/eps))
    tau_raw: float             # lam * eps / log2(n)^2
    tau: float

    # initialization phase
    rb_tau_prime_raw: float    # tau^2 eps^3 / C_RB
    rb_tau_prime: float
    rb_delta_raw: float        # tau'^2 / C_RB
    rb_delta: float
    rb_regular_threshold: float  # sqrt(12 tau' / eps), from effective tau'
    rb_rounds: int             # ceil(C_RB / eps)

    # stage phase
    stage_cap: int             # 4 log2(n)
    star_floor: float          # 1 / tau^2 (effective tau)
    fbr_rounds: int            # ceil(C_BR log2(n) / eps^3), capped
    fbr_delta_raw: float       # eps^3 / (200 C_BR log2(n)^2)
    fbr_delta: float
    m_tau_prime_raw: float     # (tau eps / C_M)^2 sqrt(lam)
    m_tau_prime: float
    m_delta_raw: float         # tau'^2 / (C_M log2 n)
    m_delta: float
    m_tau_star: float          # tau' / sqrt(lam), from effective tau'
    m_cfr_threshold: float     # sqrt(C_M tau_star)
    m_rounds: int              # ceil(C_M log2(n) / sqrt(lam)), capped

    # terminal edge test
    eps_prime_raw: float       # eps^3 / (C ln(1/eps))
    eps_prime: float
    edge_delta: float = 0.1

    @property
    def estimator_delta_floor(self) -> Optional[float]:
        return self.constants.estimator_delta_floor

    @property
    def expected_infeasible(self) -> bool:
        """True when the raw accuracies imply unrunnable sample sizes."""
        return self.rb_tau_prime < 1e-2 or self.eps_prime < 1e-4

    def to_dict(self) -> dict:
        d = asdict(self)
        d["constants"] = asdict(self.constants)
        return d


def build_schedule(n: int, eps: float,
                   profile: str = PROFILE_PRACTICAL) -> ParameterSchedule:
    """Populate every derived parameter for a tester run on n variables.

    eps is clamped into (0, 1/2]: the distance to monotone never exceeds 1/2,
    so larger requests are equivalent to 1/2 (a warning is emitted).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not (eps > 0.0):
        raise ValueError("eps must be positive")
    eps_requested = float(eps)
    if eps > 0.5:
        warnings.warn(f"eps={eps} clamped to 0.5 "
                      "(distance to monotone is at most 1/2)", stacklevel=2)
        eps = 0.5
    if profile == PROFILE_PRACTICAL:
        const = PRACTICAL_CONSTANTS
    elif profile == PROFILE_THEORETICAL:
        const = THEORETICAL_CONSTANTS
    else:
        raise ValueError(f"unknown profile {profile!r}")

    log2n = math.log2(n)
    lam = eps * eps / (36.0 * math.log(12.0 / eps))
    tau_raw = lam * eps / log2n ** 2
    tau = _floored(tau_raw, const.tau_floor)

    rb_tau_prime_raw = tau_raw ** 2 * eps ** 3 / const.c_rb
    rb_tau_prime = _floored(rb_tau_prime_raw, const.influence_floor)
    rb_delta_raw = rb_tau_prime_raw ** 2 / const.c_rb
    rb_delta = _floored(rb_delta_raw, const.delta_floor)
    rb_regular_threshold = math.sqrt(12.0 * rb_tau_prime / eps)
    rb_rounds = _capped_rounds(const.c_rb / eps, None)

    fbr_delta_raw = eps ** 3 / (200.0 * const.c_br * log2n ** 2)
    m_tau_prime_raw = (tau_raw * eps / const.c_m) ** 2 * math.sqrt(lam)
    m_tau_prime = _floored(m_tau_prime_raw, const.influence_floor)
    m_delta_raw = m_tau_prime_raw ** 2 / (const.c_m * log2n)
    m_tau_star = m_tau_prime / math.sqrt(lam)

    eps_prime_raw = eps ** 3 / (const.c_eps * math.log(1.0 / eps))
    return ParameterSchedule(
        profile=profile, n=n, eps=eps, eps_requested=eps_requested,
        log2n=log2n, constants=const,
        lam=lam, tau_raw=tau_raw, tau=tau,
        rb_tau_prime_raw=rb_tau_prime_raw, rb_tau_prime=rb_tau_prime,
        rb_delta_raw=rb_delta_raw, rb_delta=rb_delta,
        rb_regular_threshold=rb_regular_threshold, rb_rounds=rb_rounds,
        stage_cap=int(math.ceil(4 * log2n)),
        star_floor=1.0 / tau ** 2,
        fbr_rounds=_capped_rounds(const.c_br * log2n / eps ** 3,
                                  const.round_cap),
        fbr_delta_raw=fbr_delta_raw,
        fbr_delta=_floored(fbr_delta_raw, const.delta_floor),
        m_tau_prime_raw=m_tau_prime_raw, m_tau_prime=m_tau_prime,
        m_delta_raw=m_delta_raw,
        m_delta=_floored(m_delta_raw, const.delta_floor),
        m_tau_star=m_tau_star,
        m_cfr_threshold=math.sqrt(const.c_m * m_tau_star),
        m_rounds=_capped_rounds(const.c_m * log2n / math.sqrt(lam),
                                const.round_cap),
        eps_prime_raw=eps_prime_raw,
        eps_prime=_floored(eps_prime_raw, const.eps_prime_floor),
    )
