"""Visit-time statistics and lower-density proxies, discrete and continuous.

The lower density (a liminf) is replaced by a windowed running minimum of
count(n)/n over [window_fraction * N, N]; this lower-bounds every finite
prefix of the evidence and is reported next to N so scaling is visible.
Continuous visit sets are measured on a grid with a rigorous Lipschitz
modulus, yielding inner and outer estimates.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constructor import FhcPlacement, orbit_eval, proximity_bound
from .spaces import distance

CSV_COLUMNS = [
    "l",
    "epsilon",
    "horizon",
    "visit_count",
    "density_floor",
    "covering_set_check",
    "proof_bound",
    "certified_error",
]


@dataclass
class OrbitReport:
    l: int
    epsilon: float
    horizon: float
    visit_times: list
    density_floor: float
    covering_set_check: bool
    proof_bound: float
    certified_error: float
    guarantee_vacuous: bool = False
    mode: str = "discrete"
    # continuous-mode extras
    inner_measure: float = 0.0
    outer_measure: float = 0.0
    continuity_window: float = 0.0

    def to_json_dict(self):
        return {
            "l": self.l,
            "epsilon": self.epsilon,
            "horizon": self.horizon,
            "visit_times": self.visit_times,
            "density_floor": self.density_floor,
            "covering_set_check": self.covering_set_check,
            "proof_bound": self.proof_bound,
            "certified_error": self.certified_error,
            "guarantee_vacuous": self.guarantee_vacuous,
            "mode": self.mode,
            "inner_measure": self.inner_measure,
            "outer_measure": self.outer_measure,
            "continuity_window": self.continuity_window,
        }

    @classmethod
    def from_json_dict(cls, obj):
        return cls(**obj)


def density_proxy(visits, N: int, window_fraction: float = 0.1) -> float:
    """min over n in [window_fraction*N, N] of |visits ∩ [1, n]| / n."""
    ws = max(1, int(window_fraction * N))
    if ws > N:
        raise ValueError("empty density window")
    mem = np.asarray(sorted(visits), dtype=np.int64)
    ns = np.arange(ws, N + 1, dtype=np.int64)
    counts = np.searchsorted(mem, ns, side="right")
    return float(np.min(counts / ns))


def discrete_visits(p: FhcPlacement, l: int, epsilon: float, N: int,
                    window_fraction: float = 0.1,
                    _distances=None) -> OrbitReport:
    """Visit times {n <= N : ||orbit(n) - y_l|| + err < epsilon} and statistics."""
    if N > p.horizon:
        raise ValueError("N must not exceed the placement horizon")
    y = p.cert.target(l)
    visits = []
    max_err = 0.0
    for n in range(1, N + 1):
        if _distances is not None:
            d, err = _distances[n - 1]
        else:
            vec, err = orbit_eval(p, n)
            d = distance(vec, y)
        max_err = max(max_err, err)
        if d + err < epsilon:
            visits.append(n)
    bound = proximity_bound(l)
    vacuous = not epsilon > bound + max_err
    key = (l, p.tail_certificate.threshold(l))
    scheduled = p.schedule.members(key, N)
    covering = set(scheduled) <= set(visits)
    return OrbitReport(
        l=l,
        epsilon=epsilon,
        horizon=N,
        visit_times=visits,
        density_floor=density_proxy(visits, N, window_fraction) if visits else 0.0,
        covering_set_check=covering,
        proof_bound=bound,
        certified_error=max_err,
        guarantee_vacuous=vacuous,
    )


def discrete_report(p: FhcPlacement, epsilons: dict, N: int,
                    window_fraction: float = 0.1):
    """Reports for several targets sharing one orbit sweep.

    ``epsilons`` maps l -> radius.  The orbit is evaluated once per n and
    compared against every requested target.
    """
    if N > p.horizon:
        raise ValueError("N must not exceed the placement horizon")
    ls = sorted(epsilons)
    targets = {l: p.cert.target(l) for l in ls}
    per_l = {l: [] for l in ls}
    for n in range(1, N + 1):
        vec, err = orbit_eval(p, n)
        for l in ls:
            per_l[l].append((distance(vec, targets[l]), err))
    return [
        discrete_visits(p, l, epsilons[l], N, window_fraction, _distances=per_l[l])
        for l in ls
    ]


# --------------------------------------------------------------------------
# continuous mode


def continuity_window(target, epsilon: float, lam: float,
                      integer_radius: float) -> float:
    """Largest delta in (0, 1] with

        e^(lam*s) * integer_radius + (e^(lam*s) - 1)*||y|| + e^(lam*s)*s*Lip(y)
            <= epsilon   for all s in [0, delta].

    This is the finite-horizon form of the strong-continuity argument: an
    integer visit within ``integer_radius`` certifies the whole window
    [n, n + delta] as visits within epsilon.  Returns 0.0 if even s -> 0
    fails (radius too large).
    """
    ynorm = target.norm()
    lip = target.max_slope()

    def ok(s):
        g = math.exp(lam * s)
        return g * integer_radius + (g - 1.0) * ynorm + g * s * lip <= epsilon

    if not ok(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    if ok(hi):
        return hi
    for _ in range(60):
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def continuous_visits(orbit, target, epsilon: float, t_max: float,
                      grid_step: float, window_fraction: float = 0.1) -> OrbitReport:
    """Measure {t in [0, t_max] : ||orbit(t) - y|| < epsilon} on a grid.

    ``orbit`` is a SolutionOrbit (regularized_semigroup module).  Cells are
    classified with the orbit's certified Lipschitz modulus: inner cells
    are provably inside the visit set, outer cells possibly intersect it.
    Certified integer-visit windows [n, n + delta] from the continuity
    argument are united into the inner estimate.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    lam = float(orbit.lam)
    radius = epsilon / 2.0
    delta = continuity_window(target, epsilon, lam, radius)

    n_cells = int(math.ceil(t_max / grid_step))
    inner_intervals = []
    outer_measure = 0.0
    visit_cells = []
    for i in range(n_cells):
        t0 = i * grid_step
        t1 = min(t_max, t0 + grid_step)
        vec, err = orbit.evaluate(t0)
        d = distance(vec, target)
        lip = orbit.lipschitz_bound(t0, t1)
        if d + err + lip * (t1 - t0) < epsilon:
            inner_intervals.append((t0, t1))
            visit_cells.append(t0)
        if d - err - lip * (t1 - t0) < epsilon:
            outer_measure += t1 - t0

    # certified windows from integer visits
    certified_count = 0
    if delta > 0:
        for n in range(0, int(math.floor(t_max - delta)) + 1):
            vec, err = orbit.evaluate(float(n))
            if distance(vec, target) + err < radius:
                certified_count += 1
                inner_intervals.append((float(n), float(n) + delta))

    inner = _union_measure(inner_intervals)
    visits = sorted(set(int(t) for t, _ in inner_intervals))
    report = OrbitReport(
        l=0,
        epsilon=epsilon,
        horizon=t_max,
        visit_times=visits,
        density_floor=inner / t_max if t_max > 0 else 0.0,
        covering_set_check=inner >= delta * certified_count - 1e-12,
        proof_bound=delta * certified_count,
        certified_error=0.0,
        mode="continuous",
        inner_measure=inner,
        outer_measure=outer_measure,
        continuity_window=delta,
    )
    return report


def _union_measure(intervals) -> float:
    if not intervals:
        return 0.0
    intervals = sorted(intervals)
    total = 0.0
    cur_lo, cur_hi = intervals[0]
    for lo, hi in intervals[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + (cur_hi - cur_lo)


# --------------------------------------------------------------------------
# export


def reports_to_csv_text(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(
            [
                r.l,
                repr(float(r.epsilon)),
                repr(float(r.horizon)),
                len(r.visit_times),
                repr(float(r.density_floor)),
                "true" if r.covering_set_check else "false",
                repr(float(r.proof_bound)),
                repr(float(r.certified_error)),
            ]
        )
    return buf.getvalue()


def report_export(reports, csv_path=None, json_path=None):
    """Write reports; CSV carries the summary row per target, JSON everything."""
    try:
        if csv_path is not None:
            with open(csv_path, "w", newline="") as fh:
                fh.write(reports_to_csv_text(reports))
        if json_path is not None:
            with open(json_path, "w") as fh:
                json.dump([r.to_json_dict() for r in reports], fh, indent=1)
    except OSError as exc:
        raise OSError(f"report export failed for {exc.filename!r}: {exc}") from exc


def report_import(json_path):
    with open(json_path) as fh:
        return [OrbitReport.from_json_dict(obj) for obj in json.load(fh)]
