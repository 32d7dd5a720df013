"""Certified tail bounds for the forward/backward series and the thresholds N_l.

``tail_norm`` returns a rigorous upper bound on

    sup { || sum_{n in F} G^n y ||  :  F finite, F ∩ [1, N-1] = empty }

for G the certificate's forward or inverse action.  Forward series of the
built-in operators die after a finite extinction index, so the forward
bound is a finite triangle sum (exactly 0 once N passes extinction).
Inverse series are dominated termwise: disjointly supported single-entry
targets combine in the space norm, everything else by the triangle
inequality, and the infinite remainder is closed off with a certified
geometric ratio.

``compute_thresholds`` searches the minimal N_l making all four displayed
inequalities hold with constants 1/(l*2^l) and 1/2^l.  With T_n = A^n and
S_k = B^k the criterion's doubly indexed sums collapse (A^(k+n) B^k = A^n,
A^k B^(k+n) = B^n on the dense class), so one N per l certifies uniformly
in k.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .operators import (
    Differentiation,
    OperatorCertificate,
    TranslationGenerator,
    WeightedBackwardShift,
    apply_forward,
    apply_inverse,
    forward_extinction_index,
    right_inverse_identity_check,
)
from .spaces import PolySeries, SparseVector, accumulate, distance

_NEGLIGIBLE = 1e-34
_TINY_FLOOR = 1e-300  # reported lower clamp for positive but subnormal bounds


class CertificationError(Exception):
    """Raised when a threshold search exceeds its cap."""


@dataclass(frozen=True)
class ThresholdRecord:
    N: int
    forward_tail_bound: float
    inverse_tail_bound: float
    target_tail_bound: float  # inverse tail of y_l itself (the 1/2^l condition)
    identity_residual: float


@dataclass(frozen=True)
class TailCertificate:
    cert: OperatorCertificate
    records: tuple  # ThresholdRecord per l = 1..L

    def threshold(self, l: int) -> int:
        return self.records[l - 1].N

    def pairs(self):
        """(l, N_l) pairs feeding the partition schedule."""
        return [(l + 1, rec.N) for l, rec in enumerate(self.records)]

    def to_json_dict(self):
        return {
            "type": "tail_certificate",
            "records": [
                {
                    "l": l + 1,
                    "N": r.N,
                    "forward_tail_bound": r.forward_tail_bound,
                    "inverse_tail_bound": r.inverse_tail_bound,
                    "target_tail_bound": r.target_tail_bound,
                    "identity_residual": r.identity_residual,
                }
                for l, r in enumerate(self.records)
            ],
        }


# --------------------------------------------------------------------------
# certified ratio bounds for the inverse (decaying) series


def _inverse_ratio_bound(cert: OperatorCertificate, y, n: int) -> float:
    """Upper bound on ||G^(n+1) y|| / ||G^n y|| for the decaying action."""
    r = cert.power
    op = cert.op
    if isinstance(op, WeightedBackwardShift):
        kmin = y.min_index()
        # one more B^r multiplies each entry by w^-(i + ... + i+r-1), i >= kmin + r*n
        return abs(op.w) ** -(r * (kmin + r * n))
    if isinstance(op, Differentiation):
        from .spaces import CkModel

        jmin = y.min_degree()
        base = jmin + r * n
        if isinstance(op.model, CkModel):
            # C^k sup-norms of antiderivatives lose k derivative factors
            big = max(abs(op.model.a), abs(op.model.b), 1.0)
            q = big**r
            for i in range(1, r + 1):
                q /= max(1, base + i - op.model.k)
            return q
        q = 1.0
        for i in range(1, r + 1):
            q /= base + i
        return q
    if isinstance(op, TranslationGenerator):
        return math.exp(-float(op.lam) * r)
    raise TypeError(f"unknown operator model {op!r}")


def _combined(term_norms, mode: str, p: float) -> float:
    if not term_norms:
        return 0.0
    if mode == "triangle":
        return sum(term_norms)
    if mode == "max":
        return max(term_norms)
    return sum(t**p for t in term_norms) ** (1.0 / p)


def tail_norm(cert: OperatorCertificate, y, N: int, direction: str,
              max_terms: int = 600) -> float:
    """Certified upper bound on the tail of the forward or inverse series."""
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    if N < 1:
        raise ValueError("N must be >= 1")
    decaying = (direction == "inverse") != cert.swapped
    apply_n = apply_inverse if direction == "inverse" else apply_forward

    if not decaying:
        # the growing action dies at a finite extinction index
        probe = cert if not cert.swapped else _unswapped(cert)
        ext = forward_extinction_index(probe, y)
        if N >= ext:
            return 0.0
        return sum(apply_n(cert, y, n).norm() for n in range(N, ext))

    p = 2.0
    op = cert.op
    if isinstance(op, WeightedBackwardShift) and op.space.kind == "lp":
        p = op.space.p
    mode = _combine_mode_inverse(cert, y)

    terms = []
    n = N
    total_hint = 0.0
    while True:
        t = apply_n(cert, y, n).norm()
        terms.append(t)
        total_hint = max(total_hint, t)
        q = _inverse_ratio_bound(cert, y, n)
        if q < 1.0 and (t <= _NEGLIGIBLE * max(total_hint, 1.0) or len(terms) >= max_terms):
            remainder = t * q / (1.0 - q)
            break
        n += 1
        if len(terms) > max_terms + 5:
            raise CertificationError("inverse tail did not certify within the term cap")
    bound = _combined(terms, mode, p) + remainder
    if 0.0 < bound < _TINY_FLOOR:
        bound = _TINY_FLOOR
    return bound


def _combine_mode_inverse(cert, y) -> str:
    """Combine termwise norms in the space norm when successive inverse terms
    are provably disjointly supported (single-entry targets), else triangle."""
    from .spaces import HardyModel

    op = cert.op
    if isinstance(op, WeightedBackwardShift) and len(y.entries) == 1:
        return "max" if op.space.kind == "c0" else "lp"
    if isinstance(op, Differentiation) and isinstance(op.model, HardyModel):
        if sum(1 for c in y.coeffs if c != 0) == 1:
            return "lp"
    return "triangle"


def _unswapped(cert: OperatorCertificate):
    from dataclasses import replace

    return replace(cert, swapped=False)


# --------------------------------------------------------------------------
# thresholds


def compute_thresholds(cert: OperatorCertificate, search_cap: int = 10_000) -> TailCertificate:
    """Minimal N_l per target making the four displayed inequalities hold."""
    records = []
    for l in range(1, cert.target_count + 1):
        strict = 1.0 / (l * 2**l)
        loose = 1.0 / 2**l
        found = None
        for N in range(1, search_cap + 1):
            fwd = max(tail_norm(cert, cert.target(lam), N, "forward") for lam in range(1, l + 1))
            if fwd > strict:
                continue
            inv = max(tail_norm(cert, cert.target(lam), N, "inverse") for lam in range(1, l + 1))
            if inv > strict:
                continue
            own = tail_norm(cert, cert.target(l), N, "inverse")
            if own > loose:
                continue
            resid = distance(
                apply_forward(cert, apply_inverse(cert, cert.target(l), N), N),
                cert.target(l),
            )
            if resid > loose:
                continue
            found = ThresholdRecord(N, fwd, inv, own, resid)
            break
        if found is None:
            raise CertificationError(
                f"no threshold N_{l} <= {search_cap} certifies target {l}"
            )
        records.append(found)
    return TailCertificate(cert, tuple(records))


# --------------------------------------------------------------------------
# randomized probes of unconditional convergence


def unconditional_probe(cert: OperatorCertificate, y, N: int, trials: int, seed: int,
                        direction: str = "inverse", window: int = 64) -> float:
    """Max over random finite F ⊂ (N, N+window] of || sum_{n in F} G^n y ||.

    Deterministic given the seed; the result never exceeds
    tail_norm(cert, y, N+1, direction).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    apply_n = apply_inverse if direction == "inverse" else apply_forward
    rng = random.Random(seed)
    lo, hi = N + 1, N + window
    best = 0.0
    for _ in range(trials):
        size = rng.randint(0, min(window, 12))
        if size == 0:
            continue
        F = rng.sample(range(lo, hi + 1), size)
        vec = accumulate([apply_n(cert, y, n) for n in F])
        best = max(best, vec.norm())
    return best
