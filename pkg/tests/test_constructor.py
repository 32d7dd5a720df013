"""Placement of targets on scheduled times and orbit evaluation."""

from fractions import Fraction

import pytest

from fhclab.constructor import (
    assign_placements,
    materialize,
    orbit_eval,
    orbit_parts,
    proximity_bound,
)
from fhclab.criterion import compute_thresholds
from fhclab.operators import (
    TranslationGenerator,
    WeightedBackwardShift,
    apply_forward,
    make_certificate,
)
from fhclab.spaces import distance


def shift_placement(L=1, horizon=200, w=2, exact=False):
    cert = make_certificate(WeightedBackwardShift(w), L, exact=exact)
    return assign_placements(compute_thresholds(cert), horizon)


class TestProximityBound:
    def test_values(self):
        assert proximity_bound(1) == 2.5
        assert proximity_bound(3) == 0.625

    def test_rejects_nonpositive_l(self):
        with pytest.raises(ValueError):
            proximity_bound(0)


class TestAssignment:
    def test_placements_follow_the_schedule(self):
        p = shift_placement(L=3, horizon=500)
        tc = p.tail_certificate
        for n, l in p.placements.items():
            key = p.schedule.locate(n)
            assert key is not None
            assert (key.l, key.nu) == (l, tc.threshold(l))

    def test_every_target_is_placed(self):
        p = shift_placement(L=3, horizon=500)
        assert set(p.placements.values()) == {1, 2, 3}

    def test_placed_times_respect_thresholds(self):
        p = shift_placement(L=3, horizon=500)
        tc = p.tail_certificate
        for n, l in p.placements.items():
            assert n >= tc.threshold(l)

    def test_horizon_below_thresholds_rejected(self):
        cert = make_certificate(WeightedBackwardShift(2), 5)
        tc = compute_thresholds(cert)
        with pytest.raises(ValueError):
            assign_placements(tc, horizon=2)

    def test_json_dict_shape(self):
        p = shift_placement(L=2, horizon=100)
        obj = p.to_json_dict()
        assert obj["horizon"] == 100
        assert obj["placements"] == [[n, p.placements[n]] for n in p.placed_ns]


class TestMaterialize:
    def test_leading_term_of_x(self):
        # first placed time is n=3 carrying y_1 = e_1; B^3 e_1 = 2^-6 e_4
        p = shift_placement()
        x, tail = materialize(p, p.horizon)
        assert p.placed_ns[0] == 3
        assert x.min_index() == 4
        assert x.entries[4] == pytest.approx(2.0**-6)

    def test_tail_shrinks_with_depth(self):
        p = shift_placement()
        _, t1 = materialize(p, 5)
        _, t2 = materialize(p, 50)
        assert t2 < t1

    def test_orbit_at_zero_is_x(self):
        p = shift_placement()
        x, tail = materialize(p, p.horizon)
        vec, err = orbit_eval(p, 0)
        assert distance(vec, x) == 0.0
        assert err == tail


class TestOrbit:
    def test_visit_hits_target_within_bound(self):
        p = shift_placement()
        y1 = p.cert.target(1)
        for n in p.schedule.members(p.schedule.ranked[0], 100):
            vec, err = orbit_eval(p, n)
            assert distance(vec, y1) + err <= proximity_bound(1)

    def test_frozen_distance_at_first_visit(self):
        p = shift_placement()
        vec, err = orbit_eval(p, 3)
        # dominated by the n=7 neighbour: A^3 B^7 e_1 = B^4 e_1, norm 2^-10
        assert distance(vec, p.cert.target(1)) == pytest.approx(2.0**-10, abs=1e-12)

    def test_component_bounds(self):
        p = shift_placement(L=3, horizon=2000)
        for l in (1, 2, 3):
            key = p.schedule.ranked[[k.l for k in p.schedule.ranked].index(l)]
            for n in p.schedule.members(key, 300):
                fwd, mid, bwd, err = orbit_parts(p, n)
                y = p.cert.target(l)
                assert fwd.norm() <= 2 / 2**l + 1e-12
                assert distance(mid, y) <= 2 / 2**l + 1e-12
                assert bwd.norm() + err <= 1 / 2**l + 1e-12

    def test_exact_decomposition_consistency(self):
        # orbit_eval must agree with literally applying A^n to the materialized
        # sum; exact rational arithmetic, small horizon
        p = shift_placement(L=2, horizon=64, w=Fraction(2), exact=True)
        x, _ = materialize(p, 64)
        cert = p.cert
        for n in (1, 3, 7, 12):
            direct = apply_forward(cert, x, n)
            vec, err = orbit_eval(p, n)
            assert distance(direct, vec) <= err + 1e-29

    def test_translation_orbit_visits(self):
        cert = make_certificate(TranslationGenerator(1), 1)
        p = assign_placements(compute_thresholds(cert), horizon=200)
        y = cert.target(1)
        n = p.placed_ns[0]
        vec, err = orbit_eval(p, n)
        assert distance(vec, y) + err <= proximity_bound(1)
