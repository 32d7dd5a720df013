"""Assembly of the frequently hypercyclic vector and stable orbit evaluation.

The vector is x = sum_n B^n z_n where z_n = y_l exactly when n lands in the
scheduled set A(l, N_l).  The n-th orbit point is never computed by iterating
the operator on a truncated float vector; instead it is rebuilt term by term
from the cancellation identities A^n B^j = B^(j-n) (j >= n) and A^(n-j)
(j < n) on dense elements, which is numerically stable because growing
weights never multiply truncated small entries.

Everything beyond the evaluation window is closed off with the certified
inverse-tail bound and reported as an explicit error bar.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .criterion import TailCertificate, tail_norm
from .density_partition import PairKey, PartitionSchedule, build_schedule
from .operators import apply_forward, apply_inverse, forward_extinction_index
from .spaces import accumulate, linear_combine


def proximity_bound(l: int) -> float:
    """The proof's orbit-to-target bound 5/2^l (= 2/2^l + 2/2^l + 1/2^l)."""
    if l < 1:
        raise ValueError("l must be >= 1")
    return 5.0 / 2**l


@dataclass
class FhcPlacement:
    """Symbolic description of x up to a horizon, plus certified tails."""

    tail_certificate: TailCertificate
    schedule: PartitionSchedule
    horizon: int
    placements: dict  # n -> l for every placed n <= horizon
    placed_ns: list  # sorted keys of placements
    forward_window: int  # exact extinction bound for forward terms
    backward_window: int  # inverse terms beyond this are covered by the tail
    backward_tail: float  # certified bound for everything beyond the window

    @property
    def cert(self):
        return self.tail_certificate.cert

    def target_of(self, n: int):
        return self.cert.target(self.placements[n])

    def to_json_dict(self):
        return {
            "type": "fhc_placement",
            "horizon": self.horizon,
            "thresholds": {
                str(l + 1): rec.N
                for l, rec in enumerate(self.tail_certificate.records)
            },
            "placements": [[n, self.placements[n]] for n in self.placed_ns],
            "backward_tail": self.backward_tail,
        }


def assign_placements(tc: TailCertificate, horizon: int) -> FhcPlacement:
    """Build the schedule over {(l, N_l)} and record z_n up to the horizon."""
    pairs = [PairKey(l, N) for l, N in tc.pairs()]
    max_n = max(p.nu for p in pairs)
    if horizon < max_n:
        raise ValueError(f"horizon {horizon} is below the largest threshold {max_n}")
    sched = build_schedule(pairs)
    placements = {}
    for key in pairs:
        for n in sched.members(key, horizon):
            placements[n] = key.l
    placed = sorted(placements)

    cert = tc.cert
    fwd_window = max(
        forward_extinction_index(cert, cert.target(l))
        for l in range(1, cert.target_count + 1)
    )
    bwd_window, bwd_tail = _backward_window(tc)
    return FhcPlacement(
        tc, sched, horizon, placements, placed, fwd_window, bwd_window, bwd_tail
    )


def _backward_window(tc: TailCertificate, goal: float = 1e-30, cap: int = 4096):
    """Smallest window K with sum_l tail(y_l, K+1) <= goal (or the cap)."""
    cert = tc.cert
    K = max(rec.N for rec in tc.records)
    while K < cap:
        tail = sum(
            tail_norm(cert, cert.target(l), K + 1, "inverse")
            for l in range(1, cert.target_count + 1)
        )
        if tail <= goal:
            return K, tail
        K *= 2
    tail = sum(
        tail_norm(cert, cert.target(l), cap + 1, "inverse")
        for l in range(1, cert.target_count + 1)
    )
    return cap, tail


def _zero_like(cert):
    return apply_inverse(cert, cert.target(1), 1).scaled(0)


def materialize(p: FhcPlacement, M: int):
    """(sum_{n <= M} B^n z_n, certified bound on the omitted tail)."""
    if M > p.horizon:
        raise ValueError("M must not exceed the placement horizon")
    cert = p.cert
    terms = [
        apply_inverse(cert, p.target_of(n), n)
        for n in p.placed_ns[: bisect_right(p.placed_ns, M)]
    ]
    vec = accumulate(terms) if terms else _zero_like(cert)
    tail = sum(
        tail_norm(cert, cert.target(l), max(M + 1, 1), "inverse")
        for l in range(1, cert.target_count + 1)
    )
    return vec, tail


def orbit_parts(p: FhcPlacement, n: int):
    """(forward sum, middle term or None, backward sum, certified error).

    forward = sum_{j<n} A^(n-j) z_j  (exact: terms past the extinction
    window vanish identically), middle = z_n, backward covers placed
    j in (n, n + window] with the certified tail bound for the rest.
    """
    if not 0 <= n <= p.horizon:
        raise ValueError("n must lie in [0, horizon]")
    cert = p.cert
    ns = p.placed_ns
    zero = _zero_like(cert)

    lo = bisect_left(ns, max(1, n - p.forward_window))
    hi = bisect_left(ns, n)
    fwd_terms = [apply_forward(cert, p.target_of(j), n - j) for j in ns[lo:hi]]
    fwd = accumulate(fwd_terms) if fwd_terms else zero

    middle = p.target_of(n) if n in p.placements else None

    window = min(p.backward_window, p.horizon - n)
    lo = bisect_right(ns, n)
    hi = bisect_right(ns, n + window)
    bwd_terms = [apply_inverse(cert, p.target_of(j), j - n) for j in ns[lo:hi]]
    bwd = accumulate(bwd_terms) if bwd_terms else zero

    if window == p.backward_window:
        err = p.backward_tail
    else:
        err = sum(
            tail_norm(cert, cert.target(l), window + 1, "inverse")
            for l in range(1, cert.target_count + 1)
        )
    return fwd, middle, bwd, err


def orbit_eval(p: FhcPlacement, n: int):
    """(A^n x evaluated through the proof's decomposition, certified error)."""
    if n == 0:
        return materialize(p, p.horizon)
    fwd, middle, bwd, err = orbit_parts(p, n)
    vec = linear_combine(1, fwd, 1, bwd)
    if middle is not None:
        vec = linear_combine(1, vec, 1, middle)
    return vec, err
