import itertools
from fractions import Fraction as F

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphon_cycles.cone import (EdgeCone, Rate, Regime, Verdict, active_facets, classify_regime,
                                 cone_dimension, cone_membership, facet_hyperplanes, has_odd_cycle,
                                 in_omega_star, incidence_matrix, expected_cone_dimension, primitive, rank,
                                 regime_from_conditions, transform_tn)
from graphon_cycles.graphon import (CATALOG_NAMES, SkeletonGraph, StepGraphon, catalog,
                                    concentration_vector, skeleton_graph)
from graphon_cycles.simplex import solve_lp

LOOPED_TRIANGLE = SkeletonGraph(3, ((0, 0), (0, 1), (0, 2), (1, 2)))
EDGE = SkeletonGraph(2, ((0, 1),))
LOOP = SkeletonGraph(1, ((0, 0),))
TRIANGLE = SkeletonGraph(3, ((0, 1), (0, 2), (1, 2)))
K_SKEL = skeleton_graph(catalog("k"))
XK = concentration_vector(catalog("k"))


def dot(v, x):
    return sum(F(a) * F(b) for a, b in zip(v, x))


def mat_vec(z, c):
    return [sum(col[i] * cj for col, cj in zip(z.columns, c)) for i in range(z.q)]


# --- exact LP ---------------------------------------------------------------

def test_lp_small_optimum():
    # min -x0 - x1 with x0 + 2 x1 + s = 4, 3 x0 + x1 + t = 6
    res = solve_lp([[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6], [-1, -1, 0, 0])
    assert res.status == "optimal"
    assert res.objective == F(-14, 5)
    assert res.x[:2] == [F(8, 5), F(6, 5)]


def test_lp_infeasible_has_farkas_certificate():
    a = [[1, 1], [1, -1]]
    b = [1, 3]
    res = solve_lp(a, b, [0, 0])
    assert res.status == "infeasible"
    y = res.farkas
    assert all(sum(y[i] * a[i][j] for i in range(2)) >= 0 for j in range(2))
    assert sum(y[i] * b[i] for i in range(2)) < 0


def test_lp_unbounded():
    assert solve_lp([[1, -1]], [1], [-1, 0]).status == "unbounded"


def _independent_rows(a, b):
    """Row-reduce [A | b]; None when inconsistent, else an equivalent full-row-rank system."""
    rows = [[F(v) for v in row] + [F(rhs)] for row, rhs in zip(a, b)]
    out = []
    for row in rows:
        for piv_row, piv in out:
            if row[piv] != 0:
                f = row[piv] / piv_row[piv]
                row = [u - f * v for u, v in zip(row, piv_row)]
        lead = next((j for j, v in enumerate(row[:-1]) if v != 0), None)
        if lead is None:
            if row[-1] != 0:
                return None
            continue
        out.append((row, lead))
    return [r[:-1] for r, _ in out], [r[-1] for r, _ in out]


def _vertex_optimum(a, b, c):
    reduced = _independent_rows(a, b)
    if reduced is None:
        return None
    a, b = reduced
    m, n = len(a), len(c)
    if m == 0:
        return F(0)
    best = None
    for cols in itertools.combinations(range(n), m):
        sub = [[F(a[i][j]) for j in cols] + [F(b[i])] for i in range(m)]
        # Gaussian elimination on the square system
        ok = True
        for k in range(m):
            piv = next((r for r in range(k, m) if sub[r][k] != 0), None)
            if piv is None:
                ok = False
                break
            sub[k], sub[piv] = sub[piv], sub[k]
            for r in range(m):
                if r != k and sub[r][k] != 0:
                    f = sub[r][k] / sub[k][k]
                    sub[r] = [u - f * v for u, v in zip(sub[r], sub[k])]
        if not ok:
            continue
        vals = [sub[k][m] / sub[k][k] for k in range(m)]
        if min(vals) < 0:
            continue
        obj = sum(F(c[j]) * v for j, v in zip(cols, vals))
        best = obj if best is None else min(best, obj)
    return best


@given(st.integers(1, 3).flatmap(lambda m: st.tuples(
    st.lists(st.lists(st.integers(-3, 3), min_size=m + 2, max_size=m + 2), min_size=m, max_size=m),
    st.lists(st.integers(-4, 4), min_size=m, max_size=m),
    st.lists(st.integers(0, 5), min_size=m + 2, max_size=m + 2))))
@settings(max_examples=150, deadline=None)
def test_lp_matches_vertex_enumeration(problem):
    a, b, c = problem
    res = solve_lp(a, b, c)
    best = _vertex_optimum(a, b, c)
    if res.status == "infeasible":
        assert best is None
        y = res.farkas
        assert all(sum(y[i] * a[i][j] for i in range(len(a))) >= 0 for j in range(len(c)))
        assert sum(y[i] * b[i] for i in range(len(a))) < 0
    else:
        # c >= 0 keeps the problem bounded below
        assert res.status == "optimal"
        assert res.objective == best
        assert all(v >= 0 for v in res.x)
        assert all(sum(F(a[i][j]) * res.x[j] for j in range(len(c))) == b[i] for i in range(len(a)))


# --- incidence, dimension ----------------------------------------------------

def test_incidence_columns():
    assert incidence_matrix(EDGE).columns == ((F(1, 2), F(1, 2)),)
    assert incidence_matrix(LOOP).columns == ((F(1),),)
    h = F(1, 2)
    assert incidence_matrix(LOOPED_TRIANGLE).columns == ((1, 0, 0), (h, h, 0), (h, 0, h), (0, h, h))
    for name in CATALOG_NAMES:
        assert all(sum(col) == 1 for col in incidence_matrix(skeleton_graph(catalog(name))).columns)


def test_odd_cycles_and_dimension():
    assert has_odd_cycle(LOOPED_TRIANGLE) and has_odd_cycle(TRIANGLE) and not has_odd_cycle(EDGE)
    assert cone_dimension(incidence_matrix(LOOPED_TRIANGLE)) == 3
    assert cone_dimension(incidence_matrix(EDGE)) == 1
    assert cone_dimension(incidence_matrix(LOOP)) == 1


def test_expected_cone_dimension_small_skeletons():
    for q in range(1, 5):
        for g in nx.graph_atlas_g():
            if g.number_of_nodes() != q or not nx.is_connected(g):
                continue
            for loops in itertools.product((False, True), repeat=q):
                edges = list(g.edges()) + [(i, i) for i in range(q) if loops[i]]
                s = SkeletonGraph(q, tuple(edges))
                if not s.edges:
                    continue
                assert cone_dimension(incidence_matrix(s)) == expected_cone_dimension(s)


def test_rank_and_primitive():
    assert rank([(1, 0), (2, 0)]) == 1
    assert primitive((F(2, 3), F(-4, 3), 0)) == (1, -2, 0)


# --- membership ----------------------------------------------------------------

def test_membership_examples():
    z = incidence_matrix(LOOPED_TRIANGLE)
    m = cone_membership(z, (F(1, 2), F(1, 4), F(1, 4)))
    assert m.verdict is Verdict.INTERIOR
    assert min(m.coefficients) > 0 and mat_vec(z, m.coefficients) == [F(1, 2), F(1, 4), F(1, 4)]
    out = cone_membership(z, (F(1, 8), F(3, 4), F(1, 8)))
    assert out.verdict is Verdict.OUTSIDE
    assert all(dot(out.separator, col) >= 0 for col in z.columns)
    assert dot(out.separator, (F(1, 8), F(3, 4), F(1, 8))) < 0
    zk = incidence_matrix(K_SKEL)
    b = cone_membership(zk, XK)
    assert b.verdict is Verdict.BOUNDARY
    assert mat_vec(zk, b.coefficients) == list(XK) and min(b.coefficients) == 0


def test_membership_dimension_mismatch():
    with pytest.raises(ValueError):
        cone_membership(incidence_matrix(LOOPED_TRIANGLE), (F(1), F(0)))


@pytest.mark.parametrize("s", [LOOPED_TRIANGLE, K_SKEL, skeleton_graph(catalog("fig1")), TRIANGLE], ids=["looped-tri", "k", "fig1", "tri"])
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_membership_agrees_with_facets(s, data):
    x = tuple(F(v) for v in data.draw(st.lists(st.integers(0, 6), min_size=s.q, max_size=s.q)))
    z = incidence_matrix(s)
    normals = facet_hyperplanes(z).normals
    m = cone_membership(z, x)
    products = [dot(v, x) for v in normals]
    if m.verdict is Verdict.OUTSIDE:
        assert min(products) < 0
        assert dot(m.separator, x) < 0 and all(dot(m.separator, c) >= 0 for c in z.columns)
    else:
        assert min(products) >= 0
        assert mat_vec(z, m.coefficients) == list(x) and min(m.coefficients) >= 0
        assert (m.verdict is Verdict.INTERIOR) == (min(products) > 0)
    assert EdgeCone(s).contains([int(v) for v in x]) == m.inside


def test_degenerate_cone_membership():
    z = incidence_matrix(EDGE)
    assert cone_membership(z, (F(1, 2), F(1, 2))).verdict is Verdict.INTERIOR
    assert cone_membership(z, (F(3), F(5))).verdict is Verdict.OUTSIDE
    assert cone_membership(z, (F(0), F(0))).verdict is Verdict.BOUNDARY


# --- facets ----------------------------------------------------------------------

def test_facet_examples():
    assert set(facet_hyperplanes(incidence_matrix(LOOPED_TRIANGLE)).normals) == {(0, 1, 0), (0, 0, 1), (1, -1, 1), (1, 1, -1)}
    assert set(facet_hyperplanes(incidence_matrix(EDGE)).normals) == {(1, -1), (-1, 1)}
    with pytest.raises(ValueError):
        facet_hyperplanes(incidence_matrix(LOOP))


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_facet_sign_conditions(name):
    z = incidence_matrix(skeleton_graph(catalog(name)))
    for v in facet_hyperplanes(z).normals:
        assert np.gcd.reduce(np.abs(v)) == 1
        on = [c for c in z.columns if dot(v, c) == 0]
        assert all(dot(v, c) >= 0 for c in z.columns)
        assert rank(on) == z.q - 1


def test_active_facets():
    fs = facet_hyperplanes(incidence_matrix(LOOPED_TRIANGLE))
    assert active_facets(fs, (F(1, 2), F(1, 4), F(1, 4))).active_normals() == ()
    edge = facet_hyperplanes(incidence_matrix(EDGE))
    assert set(active_facets(edge, (F(1, 2), F(1, 2))).active_normals()) == {(1, -1), (-1, 1)}
    fk = facet_hyperplanes(incidence_matrix(K_SKEL))
    act = active_facets(fk, XK).active_normals()
    assert 0 < len(act) < len(fk.normals)
    assert set(act) == {(-1, 1, 1, 1, -1, -1), (1, -1, 1, -1, 1, -1)}
    with pytest.raises(ValueError):
        active_facets(fs, (F(1, 8), F(3, 4), F(1, 8)))
    with pytest.raises(ValueError):
        fs.active_normals()


def test_in_omega_star_examples():
    empty = active_facets(facet_hyperplanes(incidence_matrix(LOOPED_TRIANGLE)), (F(1, 2), F(1, 4), F(1, 4)))
    assert in_omega_star(empty, (0.9, -0.4, 0.5))
    edge = active_facets(facet_hyperplanes(incidence_matrix(EDGE)), (F(1, 2), F(1, 2)))
    assert not in_omega_star(edge, (0.6, 0.4))
    assert in_omega_star(edge, (0.5, 0.5))
    fk = active_facets(facet_hyperplanes(incidence_matrix(K_SKEL)), XK)
    assert in_omega_star(fk, XK)
    with pytest.raises(ValueError):
        in_omega_star(edge, (0.6, 0.6))


def test_transform():
    x = (F(2, 5), F(3, 5))
    xs = (F(1, 2), F(1, 2))
    assert transform_tn(x, xs, 4) == (F(3, 10), F(7, 10))
    assert transform_tn(xs, xs, 7) is not None and np.allclose(transform_tn(xs, xs, 7), [0.5, 0.5])
    assert transform_tn(x, xs, 1) == x
    y = np.array([0.1, 0.3, 0.6])
    ys = np.array([0.2, 0.3, 0.5])
    back = transform_tn(transform_tn(y, ys, 10, "forward"), ys, 10, "inverse")
    assert np.abs(back - y).max() < 1e-12


# --- regimes ---------------------------------------------------------------------------

EXPECTED = {"a": "Item1", "b": "Item1", "c": "Item1", "d": "Item2", "e": "Item2", "f": "Item2",
            "g": "Item2", "h": "Item2", "i": "Item2", "j": "Item3", "k": "Item4"}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_classify_catalog(name):
    assert classify_regime(catalog(name)).regime.value == EXPECTED[name]


def test_predicted_rates():
    assert classify_regime(catalog("a")).predicted_rate is Rate.EXP_TO_ONE
    assert classify_regime(catalog("d")).predicted_rate is Rate.EXP_TO_ZERO
    assert classify_regime(catalog("j")).predicted_rate is Rate.ROOT_N_TO_ZERO
    assert classify_regime(catalog("k")).predicted_rate is Rate.ROOT_N_TO_PSTAR


def test_regime_truth_table():
    for a, bp, b in itertools.product((False, True), repeat=3):
        if b and not bp:
            continue
        r = regime_from_conditions(a, bp, b)
        hits = [a and b, not bp, bp and not a, a and bp and not b]
        assert sum(hits) == 1
        assert r is [Regime.ITEM1, Regime.ITEM2, Regime.ITEM3, Regime.ITEM4][hits.index(True)]


def test_disconnected_skeleton_rejected():
    half = F(1, 2)
    w = StepGraphon("split", (F(0), half, F(1)), ((F(1), F(0)), (F(0), F(1))))
    with pytest.raises(ValueError, match="disconnected"):
        classify_regime(w)


# --- T_n / Omega* properties -------------------------------------------------------

def _random_cone_point(z, rng):
    c = [F(int(v)) for v in rng.integers(0, 20, size=len(z.columns))]
    if sum(c) == 0:
        c[0] = F(1)
    x = mat_vec(z, c)
    total = sum(x)
    return tuple(v / total for v in x)


@pytest.mark.parametrize("name", [n for n in CATALOG_NAMES if EXPECTED.get(n, "Item1") != "Item2"])
def test_omega_n_inside_omega_star(name):
    w = catalog(name)
    s = skeleton_graph(w)
    z = incidence_matrix(s)
    xs = concentration_vector(w)
    fs = active_facets(facet_hyperplanes(z), xs)
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = _random_cone_point(z, rng)
        for n in (1, 4, 25, 10**4):
            assert in_omega_star(fs, transform_tn(x, xs, n))


def test_small_ball_of_omega_star_maps_into_cone():
    from graphon_cycles.rng import RngStream
    from graphon_cycles.stochastic import build_gaussian, sample_omega_star

    fs = active_facets(facet_hyperplanes(incidence_matrix(K_SKEL)), XK)
    model = build_gaussian(XK)
    z = incidence_matrix(K_SKEL)
    n, r = 10**4, 1 / 16
    rng = RngStream(21)
    x = np.array([float(v) for v in XK])
    checked = 0
    while checked < 200:
        omega = sample_omega_star(model, rng)
        if not in_omega_star(fs, omega):
            continue
        dev = omega - x
        omega = x + dev * (r * np.sqrt(n) * rng.uniform() / np.linalg.norm(dev))
        back = transform_tn(omega, x, n, "inverse")
        assert cone_membership(z, tuple(F(float(v)) for v in back)).inside
        checked += 1
