from fractions import Fraction

import pytest

from graphhodge import exact
from graphhodge.cech import (
    cohomology,
    predicted_betti,
    predicted_betti_all,
    preset_system,
    rho_matrix,
    spectral_sequence_terms,
    system_from_dict,
)
from graphhodge.errors import DegreeOutOfRangeError, GradeMissingError
from graphhodge.graph import build_graph

# Hand Mayer-Vietoris oracles for the three shipped scenes:
#   sphere = two disks over one edge:      H* = (1, 0, 1)
#   torus  = one annulus over a self-loop: H* = (1, 2, 1)
#   theta  = two pants over three edges:   H* = (1, 4, 1), genus 2


def sphere_system():
    g = build_graph(["a", "b"], [("e", "a", "b", "c")])
    return preset_system(g, {"a": "cap", "b": "cap"})


def torus_system():
    g = build_graph(["v"], [("e", "v", "v", "c")])
    return preset_system(g, {"v": "tube"})


def theta_system():
    g = build_graph(["a", "b"], [("e1", "a", "b", "c"), ("e2", "a", "b", "c"),
                                 ("e3", "a", "b", "c")])
    return preset_system(g, {"a": "pants", "b": "pants"})


def test_sphere_rho_grade0():
    sys = sphere_system()
    rho = rho_matrix(sys, 0)
    assert rho == [[Fraction(-1), Fraction(1)]]
    assert exact.rank(rho) == 1


def test_torus_rho_vanishes():
    sys = torus_system()
    assert all(x == 0 for row in rho_matrix(sys, 0) for x in row)
    assert all(x == 0 for row in rho_matrix(sys, 1) for x in row)


def test_missing_grade_raises():
    sys = sphere_system()
    with pytest.raises(GradeMissingError):
        rho_matrix(sys, 7)


def test_sphere_cohomology_and_betti():
    coh = cohomology(sphere_system())
    assert (coh.h0[0], coh.h0[1], coh.h0[2]) == (1, 0, 0)
    assert (coh.h1[0], coh.h1[1], coh.h1[2]) == (0, 1, 0)
    assert predicted_betti_all(coh) == [1, 0, 1]
    assert predicted_betti(coh, 0) == 1
    assert predicted_betti(coh, 2) == 1


def test_torus_cohomology_and_betti():
    coh = cohomology(torus_system())
    assert (coh.h0[0], coh.h0[1]) == (1, 1)
    assert (coh.h1[0], coh.h1[1]) == (1, 1)
    assert predicted_betti_all(coh) == [1, 2, 1]


def test_theta_cohomology_and_betti():
    coh = cohomology(theta_system())
    assert (coh.h0[0], coh.h0[1], coh.h0[2]) == (1, 2, 0)
    assert (coh.h1[0], coh.h1[1], coh.h1[2]) == (2, 1, 0)
    assert predicted_betti_all(coh) == [1, 4, 1]


def test_degree_out_of_range():
    coh = cohomology(sphere_system())
    with pytest.raises(DegreeOutOfRangeError):
        predicted_betti(coh, 5)
    with pytest.raises(DegreeOutOfRangeError):
        predicted_betti(coh, -1)


def test_all_zero_maps_kernel_is_everything():
    g = build_graph(["a", "b"], [("e", "a", "b", "c")])
    sys = preset_system(g, {"a": "tube", "b": "tube"})
    # zero out every restriction matrix
    for key in sys.maps:
        for q in sys.grades:
            sys.maps[key][q] = [[Fraction(0) for _ in row] for row in sys.maps[key][q]]
    coh = cohomology(sys)
    for q in sys.grades:
        assert coh.h0[q] == sys.c0_dim(q)
        assert coh.h1[q] == sys.c1_dim(q)
    e1, e2, _ = spectral_sequence_terms(sys)
    assert e1 == e2


def test_rank_nullity_per_grade():
    sys = theta_system()
    for q in sys.grades:
        rho = rho_matrix(sys, q)
        n0 = sys.c0_dim(q)
        r = exact.rank(rho)
        ker = exact.nullspace(rho, n0)
        assert len(ker) + r == n0


def test_spectral_sequence_tables():
    _, e2, checks = spectral_sequence_terms(torus_system())
    assert (e2[0][0], e2[0][1], e2[1][0], e2[1][1]) == (1, 1, 1, 1)
    for k, (total, betti) in checks.items():
        assert total == betti
    _, e2s, _ = spectral_sequence_terms(sphere_system())
    assert e2s[0][0] == 1 and e2s[1][1] == 1
    assert e2s[0][1] == 0 and e2s[0][2] == 0 and e2s[1][0] == 0 and e2s[1][2] == 0


def test_sum_rule_over_degrees():
    for sysf in (sphere_system, torus_system, theta_system):
        sys = sysf()
        coh = cohomology(sys)
        assert sum(predicted_betti_all(coh)) == coh.h0_total() + coh.h1_total()


def test_edge_reversal_preserves_dimensions():
    g = build_graph(["a", "b"], [("e1", "a", "b", "c"), ("e2", "b", "a", "c"),
                                 ("e3", "a", "b", "c")])
    sys = preset_system(g, {"a": "pants", "b": "pants"})
    coh = cohomology(sys)
    assert predicted_betti_all(coh) == [1, 4, 1]


def test_disconnected_system_is_direct_sum():
    g = build_graph(["v", "w"], [("e1", "v", "v", "c"), ("e2", "w", "w", "c")])
    sys = preset_system(g, {"v": "tube", "w": "tube"})
    coh = cohomology(sys)
    single = cohomology(torus_system())
    for q in sys.grades:
        assert coh.h0[q] == 2 * single.h0[q]
        assert coh.h1[q] == 2 * single.h1[q]


def test_system_from_dict_round_trip():
    g = build_graph(["a", "b"], [("e", "a", "b", "c")])
    block = {
        "grades": [0, 1],
        "vertices": {"a": {"dims": [1, 0]}, "b": {"dims": [1, 0]}},
        "edges": {"e": {"dims": [1, 0]}},
        "maps": [
            {"vertex": "a", "edge": "e", "sign": 1, "matrices": {"0": [[[1, 1]]], "1": []}},
            {"vertex": "b", "edge": "e", "sign": -1, "matrices": {"0": [[[1, 1]]], "1": []}},
        ],
    }
    sys = system_from_dict(g, block)
    coh = cohomology(sys)
    assert coh.h0[0] == 1 and coh.h1[0] == 0
