"""Halfspaces, restrictions, query-counted black-box access, and certificates.

Sign convention, used everywhere: sign(t) = +1 iff t >= 0, so a halfspace
f(x) = sign(w.x - theta) outputs +1 exactly when w.x >= theta.

Evaluation backends (selected automatically, all semantically identical):

* n <= TABLE_MAX_N: the full truth table is materialized once and queries
  become packed-index lookups.
* integer-valued weights within safe bounds: per-byte int16 lookup tables
  summed in int32.  All arithmetic is exact; two points never compare
  differently because of floating-point summation order.
* otherwise: unpack and take a float64 dot product per query batch.

Instances whose weights sit on an integer grid (every generator in this
package emits such instances, with half-integer thresholds) therefore have
completely unambiguous evaluations: |w.x - theta| is either >= 1/2 or the
boundary case w.x = theta, which maps to +1.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import bits

TABLE_MAX_N = 20
# int16 byte-table bound: |w_i| <= 4095 keeps every per-byte sum within int16
# and every row total within int32.
INT_FAST_MAX_WEIGHT = 4095.0
QUERY_CHUNK = 16384


class DimensionMismatchError(ValueError):
    pass


class QueryBudgetExceededError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# LTF specification


@dataclass
class LTFSpec:
    """Explicit halfspace: weights w (float64, length n) and threshold theta."""

    weights: np.ndarray
    theta: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)) or not np.isfinite(self.theta):
            raise ValueError("weights and theta must be finite")
        self.weights = w
        self.theta = float(self.theta)

    @property
    def n(self) -> int:
        return self.weights.size

    def to_dict(self) -> dict:
        return {"n": self.n, "weights": self.weights.tolist(), "theta": self.theta}

    @classmethod
    def from_dict(cls, d: dict) -> "LTFSpec":
        spec = cls(np.asarray(d["weights"], dtype=np.float64), float(d["theta"]))
        if "n" in d and int(d["n"]) != spec.n:
            raise ValueError("instance file: n does not match weights length")
        return spec

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "LTFSpec":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def eval_ltf(spec: LTFSpec, x) -> int:
    """Evaluate a halfspace at a single +-1 point (boundary maps to +1)."""
    x = np.asarray(x)
    if x.shape != (spec.n,):
        raise DimensionMismatchError(
            f"point has shape {x.shape}, expected ({spec.n},)")
    return 1 if float(spec.weights @ x.astype(np.float64)) >= spec.theta else -1


def subset_sums(w: np.ndarray) -> np.ndarray:
    """All 2^len(w) sums of subsets of w; entry at mask m sums w[i] for set bits.

    Bit i of the mask corresponds to coordinate i being +1, matching the
    packed point layout, so `2*subset_sums(w) - w.sum()` enumerates w.x over
    the whole cube in packed-index order.
    """
    sums = np.zeros(1, dtype=np.float64)
    for wi in w:
        sums = np.concatenate([sums, sums + wi])
    return sums


def truth_table(spec: LTFSpec) -> np.ndarray:
    """int8 table of f over all 2^n packed indices (n <= TABLE_MAX_N)."""
    if spec.n > TABLE_MAX_N:
        raise ValueError(f"truth table limited to n <= {TABLE_MAX_N}")
    dots = 2.0 * subset_sums(spec.weights) - spec.weights.sum()
    return np.where(dots >= spec.theta, 1, -1).astype(np.int8)


class _LTFEvaluator:
    """Vectorized packed-batch evaluation with automatic backend choice."""

    def __init__(self, spec: LTFSpec):
        self.spec = spec
        self.n = spec.n
        w = spec.weights
        self._table = None
        self._bytes16 = None
        self._gemv_w = None
        if self.n <= TABLE_MAX_N:
            self._table = truth_table(spec)
            self._index_pows = (256 ** np.arange(bits.nbytes(self.n),
                                                 dtype=np.int64))
        elif (np.all(w == np.round(w))
                and np.all(np.abs(w) <= INT_FAST_MAX_WEIGHT)
                and float(spec.theta) * 2 == round(float(spec.theta) * 2)):
            nb = bits.nbytes(self.n)
            wp = np.zeros(8 * nb, dtype=np.float64)
            wp[: self.n] = w
            tables = np.empty((nb, 256), dtype=np.int16)
            bm = bits.BYTE_BITS.astype(np.float64)
            for p in range(nb):
                tables[p] = (bm @ wp[8 * p: 8 * p + 8]).astype(np.int16)
            self._bytes16 = tables
            self._col_idx = np.arange(nb)[None, :]
            # f = +1 iff 4*s - 2*sum(w) >= 2*theta with s the set-bit sum
            self._int_threshold = int(round(2 * spec.theta + 2 * w.sum()))
        else:
            self._gemv_w = w

    def __call__(self, packed: np.ndarray) -> np.ndarray:
        if self._table is not None:
            idx = packed.astype(np.int64) @ self._index_pows
            return self._table[idx]
        if self._bytes16 is not None:
            out = np.empty(packed.shape[0], dtype=np.int8)
            for lo in range(0, packed.shape[0], QUERY_CHUNK):
                chunk = packed[lo: lo + QUERY_CHUNK]
                g = self._bytes16[self._col_idx, chunk]
                s = np.add.reduce(g, axis=1, dtype=np.int64)
                out[lo: lo + QUERY_CHUNK] = np.where(
                    4 * s >= self._int_threshold, 1, -1)
            return out
        out = np.empty(packed.shape[0], dtype=np.int8)
        for lo in range(0, packed.shape[0], QUERY_CHUNK):
            pm = bits.unpack(packed[lo: lo + QUERY_CHUNK], self.n)
            dots = pm.astype(np.float64) @ self._gemv_w
            out[lo: lo + QUERY_CHUNK] = np.where(dots >= self.spec.theta, 1, -1)
        return out


# ---------------------------------------------------------------------------
# Restrictions


@dataclass
class Restriction:
    """Partial assignment in {-1, 0, +1}^n; 0 marks a free (star) coordinate."""

    assignment: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int8)
        if a.ndim != 1 or not np.all(np.isin(a, (-1, 0, 1))):
            raise ValueError("restriction entries must lie in {-1, 0, +1}")
        self.assignment = a
        self._packed = None

    @classmethod
    def all_stars(cls, n: int) -> "Restriction":
        return cls(np.zeros(n, dtype=np.int8))

    @classmethod
    def fixing(cls, n: int, values: dict[int, int]) -> "Restriction":
        a = np.zeros(n, dtype=np.int8)
        for i, v in values.items():
            a[i] = v
        return cls(a)

    @property
    def n(self) -> int:
        return self.assignment.size

    def stars(self) -> np.ndarray:
        return np.flatnonzero(self.assignment == 0)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.assignment != 0)

    @property
    def num_stars(self) -> int:
        return int(np.count_nonzero(self.assignment == 0))

    def extends(self, other: "Restriction") -> bool:
        """True iff self fixes everything other fixes, to the same values."""
        sup = other.support()
        return bool(np.all(self.assignment[sup] == other.assignment[sup]))

    def _packed_masks(self):
        # (star_mask, fixed_plus_bits), both packed over n coordinates
        if self._packed is None:
            star = bits.pack(np.where(self.assignment == 0, 1, -1)
                             .astype(np.int8), self.n)[0]
            plus = bits.pack(np.where(self.assignment == 1, 1, -1)
                             .astype(np.int8), self.n)[0]
            self._packed = (star, plus)
        return self._packed

    def overlay_packed(self, packed: np.ndarray) -> np.ndarray:
        """Replace fixed coordinates of a packed batch with this restriction."""
        star, plus = self._packed_masks()
        return (packed & star) | plus

    def merge(self, star_values: np.ndarray) -> np.ndarray:
        """Fill the stars (in ascending index order) with +-1 values."""
        sv = np.atleast_2d(np.asarray(star_values, dtype=np.int8))
        st = self.stars()
        if sv.shape[1] != st.size:
            raise DimensionMismatchError(
                f"{sv.shape[1]} star values for {st.size} stars")
        out = np.repeat(self.assignment[None, :], sv.shape[0], axis=0)
        out[:, st] = sv
        return out

    def __str__(self):
        return "".join("*" if v == 0 else ("+" if v > 0 else "-")
                       for v in self.assignment)

    @classmethod
    def from_string(cls, s: str) -> "Restriction":
        table = {"+": 1, "-": -1, "*": 0}
        try:
            return cls(np.array([table[c] for c in s], dtype=np.int8))
        except KeyError as exc:
            raise ValueError(f"bad restriction character {exc}") from exc


def compose(rho: Restriction, rho2: Restriction) -> Restriction:
    """Union of two restrictions with disjoint supports."""
    if rho.n != rho2.n:
        raise DimensionMismatchError("restrictions over different dimensions")
    if np.any((rho.assignment != 0) & (rho2.assignment != 0)):
        raise ValueError("compose requires disjoint supports")
    return Restriction(rho.assignment + rho2.assignment)


def random_point(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform +-1 vector of length n."""
    return bits.unpack(bits.random_packed(rng, 1, n), n)[0]


def random_assignment(indices, n: int, rng: np.random.Generator) -> Restriction:
    """Uniform restriction with support exactly `indices`."""
    indices = np.asarray(indices, dtype=np.int64)
    a = np.zeros(n, dtype=np.int8)
    if indices.size:
        a[indices] = rng.integers(0, 2, size=indices.size).astype(np.int8) * 2 - 1
    return Restriction(a)


# ---------------------------------------------------------------------------
# Query-counted oracle access


class _Counter:
    """Thread-safe monotone query counter shared across restricted views."""

    __slots__ = ("_lock", "value")

    def __init__(self):
        self._lock = threading.Lock()
        self.value = 0

    def add(self, k: int):
        with self._lock:
            self.value += k


class OracleHandle:
    """Black-box access to a Boolean function on {-1,+1}^n, counting queries.

    Points are packed batches (see bits.py).  Restricted views share the
    parent's counter: k evaluations through any view charge the root exactly k.
    A query_cap makes the handle raise before exceeding the budget; it never
    silently truncates a batch.
    """

    def __init__(self, target: Callable[[np.ndarray], np.ndarray], n: int,
                 query_cap: Optional[int] = None,
                 _counter: Optional[_Counter] = None,
                 _rho: Optional[Restriction] = None):
        self._target = target
        self.ambient_n = n
        self.query_cap = query_cap
        self._counter = _counter if _counter is not None else _Counter()
        self.rho = _rho  # None for the root handle

    @classmethod
    def for_spec(cls, spec: LTFSpec, query_cap: Optional[int] = None
                 ) -> "OracleHandle":
        return cls(_LTFEvaluator(spec), spec.n, query_cap=query_cap)

    @classmethod
    def for_function(cls, fn_pm: Callable[[np.ndarray], np.ndarray], n: int,
                     query_cap: Optional[int] = None) -> "OracleHandle":
        """Wrap a function taking (m, n) +-1 int arrays (for tests/tools)."""
        def target(packed):
            return np.asarray(fn_pm(bits.unpack(packed, n)), dtype=np.int8)
        return cls(target, n, query_cap=query_cap)

    @property
    def query_count(self) -> int:
        return self._counter.value

    @property
    def domain(self) -> np.ndarray:
        """Ambient labels of the free coordinates, ascending."""
        if self.rho is None:
            return np.arange(self.ambient_n)
        return self.rho.stars()

    @property
    def domain_size(self) -> int:
        return self.ambient_n if self.rho is None else self.rho.num_stars

    def _charge(self, k: int):
        if self.query_cap is not None and self._counter.value + k > self.query_cap:
            raise QueryBudgetExceededError(
                f"query budget exceeded: {self._counter.value} used, "
                f"{k} requested, cap {self.query_cap}")
        self._counter.add(k)

    def query_packed(self, packed: np.ndarray) -> np.ndarray:
        """Evaluate an (m, nbytes(ambient_n)) batch of ambient-width points.

        For restricted views the fixed coordinates of the batch are overridden
        by the restriction, so callers may fill them with anything (typically
        fresh random bytes).
        """
        packed = np.atleast_2d(packed)
        self._charge(packed.shape[0])
        if self.rho is not None:
            packed = self.rho.overlay_packed(packed)
        return self._target(packed)

    def query_pm(self, points_pm: np.ndarray) -> np.ndarray:
        """Evaluate +-1 points given over this view's free coordinates."""
        pm = np.atleast_2d(np.asarray(points_pm, dtype=np.int8))
        if pm.shape[1] != self.domain_size:
            raise DimensionMismatchError(
                f"points have {pm.shape[1]} coordinates, "
                f"domain has {self.domain_size}")
        if self.rho is None:
            full = pm
        else:
            full = self.rho.merge(pm)
        return self.query_packed(bits.pack(full, self.ambient_n))

    def query_point(self, point_pm: np.ndarray) -> int:
        return int(self.query_pm(np.asarray(point_pm)[None, :])[0])

    def lift(self, packed: np.ndarray) -> np.ndarray:
        """Ambient packed points actually seen by the target for this batch."""
        packed = np.atleast_2d(packed)
        return self.rho.overlay_packed(packed) if self.rho is not None else packed


def restrict(f: OracleHandle, rho: Restriction) -> OracleHandle:
    """View of f under rho (ambient coordinates), charging f's counter.

    Restricting an already-restricted handle composes the restrictions; the
    new support must be disjoint from (i.e. star in) the existing one.
    """
    if rho.n != f.ambient_n:
        raise DimensionMismatchError("restriction dimension mismatch")
    merged = rho if f.rho is None else compose(f.rho, rho)
    if merged.num_stars == merged.n:
        merged = None  # identity restriction: keep the fast path
    return OracleHandle(f._target, f.ambient_n, query_cap=f.query_cap,
                        _counter=f._counter, _rho=merged)


def restricted_spec(spec: LTFSpec, rho: Restriction) -> LTFSpec:
    """The halfspace induced on the stars: same weights, shifted threshold."""
    if rho.n != spec.n:
        raise DimensionMismatchError("restriction dimension mismatch")
    fixed = rho.support()
    shift = float(spec.weights[fixed] @ rho.assignment[fixed])
    return LTFSpec(spec.weights[rho.stars()], spec.theta - shift)


# ---------------------------------------------------------------------------
# Certificates and verdicts


@dataclass(frozen=True)
class AntiMonotoneEdgeCertificate:
    """A checkable witness: flipping coordinate i from -1 to +1 flips f from +1 to -1."""

    base_point: np.ndarray  # +-1 int8 vector, ambient width
    coordinate: int

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.base_point, dtype=np.int8).copy()
        hi = lo.copy()
        lo[self.coordinate] = -1
        hi[self.coordinate] = 1
        return lo, hi

    def to_dict(self) -> dict:
        return {"point": bits.point_to_string(self.base_point),
                "coordinate": int(self.coordinate)}

    @classmethod
    def from_dict(cls, d: dict) -> "AntiMonotoneEdgeCertificate":
        return cls(bits.point_from_string(d["point"]), int(d["coordinate"]))


def verify_certificate(f: OracleHandle,
                       cert: AntiMonotoneEdgeCertificate) -> bool:
    """Re-check a certificate with exactly 2 queries."""
    lo, hi = cert.endpoints()
    vals = f.query_pm(np.stack([lo, hi]))
    return int(vals[0]) == 1 and int(vals[1]) == -1


MONOTONE = "monotone"
NON_MONOTONE = "non-monotone"


@dataclass(frozen=True)
class Verdict:
    """Two-valued outcome plus a diagnostic recording which branch produced it.

    A non-monotone verdict always carries a certificate; there is no code path
    that can reject without one.
    """

    outcome: str
    diagnostic: str
    certificate: Optional[AntiMonotoneEdgeCertificate] = None

    def __post_init__(self):
        if self.outcome not in (MONOTONE, NON_MONOTONE):
            raise ValueError(f"bad outcome {self.outcome!r}")
        if self.outcome == NON_MONOTONE and self.certificate is None:
            raise ValueError("non-monotone verdicts require a certificate")

    @classmethod
    def monotone(cls, diagnostic: str) -> "Verdict":
        return cls(MONOTONE, diagnostic)

    @classmethod
    def non_monotone(cls, certificate: AntiMonotoneEdgeCertificate,
                     diagnostic: str) -> "Verdict":
        return cls(NON_MONOTONE, diagnostic, certificate)

    @property
    def is_monotone(self) -> bool:
        return self.outcome == MONOTONE
