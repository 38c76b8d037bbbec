import numpy as np
import pytest

from polycontain import containment
from polycontain.containment import (AH_IN_AH, AH_IN_H, CONTAINED, DISJUNCTION, DISJUNCTIVE, H_HULL, H_IN_H,
                                     HULL, HULL_OF, NOT_CERTIFIED, REFUTED, SUM, SUM_CIRCUMBODY, SUM_INBODY,
                                     ZONOTOPE, ZONOTOPE_DISJUNCTIVE, ZONOTOPE_HULL, ContainmentCertificate,
                                     ContainmentQuery)
from polycontain.errors import DimensionMismatchError, InvalidInputError
from polycontain.geometry import (AHPolytope, HPolytope, Zonotope, affine_map, convex_hull_ahrep, minkowski_sum_all,
                                  translate, unit_box)
from polycontain.oracle import containment_oracle, contains_point, vertex_candidates


def random_polygon(rng, rows=None, shift=None):
    """Bounded polygon from jittered, evenly spread facet normals"""
    rows = rows or int(rng.integers(5, 9))
    angles = 2 * np.pi * np.arange(rows) / rows + rng.uniform(-0.3, 0.3, size=rows)
    H = np.column_stack([np.cos(angles), np.sin(angles)])
    h = rng.uniform(0.5, 1.5, size=rows)
    if shift is not None:
        h = h + H @ shift
    return HPolytope(H, h)


def random_zonotope(rng, n=2, cols=None, scale=1.0, center_scale=0.3):
    cols = cols or int(rng.integers(n, n + 3))
    return Zonotope(rng.uniform(-center_scale, center_scale, size=n), scale * rng.uniform(-1.0, 1.0, size=(n, cols)))


def _in_hull(parts, inbody):
    hull = convex_hull_ahrep(parts)
    return all(contains_point(hull, v) for v in vertex_candidates(inbody))


# -------------------------------------------------------------- examples

def test_zonotope_pair_is_certified(ex1):
    Zx, Zy, Zy_star = ex1
    for method in (containment.AUTO, ZONOTOPE, AH_IN_AH):
        result = containment.contains(Zx, Zy, method=method)
        assert result.verdict == CONTAINED
        assert containment.certificate_ok(result.certificate, Zx, Zy)
        assert containment.interpretation_check(result.certificate, Zx, Zy)
        dropped = containment.contains(Zx, Zy_star, method=method)
        assert dropped.verdict == NOT_CERTIFIED
        assert dropped.certificate is None


def test_auto_picks_zonotope_method(ex1):
    Zx, Zy, _ = ex1
    query = ContainmentQuery(Zx, Zy)
    assert containment.resolve_method(query) == (ZONOTOPE, False)
    assert containment.contains(Zx, Zy).to_dict() == {"verdict": CONTAINED, "method": ZONOTOPE, "lossless": False}


def test_encoding_loss_on_three_dimensional_pair(ex2, expected):
    Zx, Zy = ex2
    result = containment.contains(Zx, Zy, method=ZONOTOPE)
    assert result.verdict == NOT_CERTIFIED
    lam, cert = containment.max_scaling(Zx, Zy, method=ZONOTOPE)
    assert abs(lam - expected["ex2"]["max_scaling"]) <= expected["ex2"]["tol"]
    assert containment.replay_certificate(cert, Zx, Zy) <= 1e-6


def test_minkowski_sum_circumbody(ex3, expected):
    P1, P2, P_sum = ex3
    lam, cert = containment.max_scaling(P_sum, [P1, P2], kind=SUM)
    assert abs(lam - expected["ex3"]["max_scaling"]) <= expected["ex3"]["tol"]
    assert cert.encoding_tag == SUM_CIRCUMBODY
    assert containment.certificate_ok(cert, P_sum, [P1, P2])
    assert containment.contains(P1, P_sum).verdict == CONTAINED
    result = containment.contains([P1, P2], P_sum)
    assert result.method == SUM_INBODY
    assert result.verdict == CONTAINED


def test_sum_of_maps_is_always_certified(rng):
    S = random_polygon(rng)
    for count in (1, 2, 4):
        maps = [rng.normal(size=(2, 2)) for _ in range(count)]
        result = containment.check_sum_of_maps(maps, S)
        assert result.verdict == CONTAINED
        assert containment.certificate_ok(result.certificate, affine_map(np.sum(maps, axis=0), None, S),
                                          [affine_map(A, None, S) for A in maps])
    with pytest.raises(InvalidInputError):
        containment.check_sum_of_maps([], S)


# --------------------------------------------------------- lossless routes

def _h_in_h_suite(rng, trials):
    for _ in range(trials):
        Py = random_polygon(rng)
        Px = random_polygon(rng, shift=rng.uniform(-0.5, 0.5, size=2))
        Px = HPolytope(Px.H, Px.h * rng.uniform(0.2, 1.2))
        result = containment.contains(Px, Py)
        assert result.method == H_IN_H
        assert result.verdict in (CONTAINED, REFUTED)
        assert result.contained == containment_oracle(Px, Py)
        if result.contained:
            assert containment.certificate_ok(result.certificate, Px, Py)


def _ah_in_h_suite(rng, trials):
    for _ in range(trials):
        n = int(rng.integers(2, 4))
        Zx = random_zonotope(rng, n=n, scale=rng.uniform(0.2, 0.8))
        Py = HPolytope(np.vstack([np.eye(n), -np.eye(n), rng.normal(size=(3, n))]),
                       rng.uniform(0.8, 1.5, size=2 * n + 3))
        result = containment.contains(Zx, Py)
        assert result.method == AH_IN_H
        assert result.lossless
        assert result.contained == containment_oracle(Zx, Py)


def _ah_in_ah_suite(rng, trials):
    for _ in range(trials):
        Y = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        circ = AHPolytope(rng.uniform(-0.2, 0.2, size=2), Y, random_polygon(rng))
        Zx = random_zonotope(rng, scale=rng.uniform(0.3, 1.5))
        result = containment.contains(Zx, circ)
        assert result.method == AH_IN_AH
        assert result.lossless
        assert result.contained == containment_oracle(Zx, circ)
        if result.contained:
            assert containment.certificate_ok(result.certificate, Zx, circ)
            assert containment.interpretation_check(result.certificate, Zx, circ)


def _sum_inbody_suite(rng, trials):
    for _ in range(trials):
        parts = [random_zonotope(rng, cols=2, scale=rng.uniform(0.1, 0.6)) for _ in range(2)]
        Py = random_polygon(rng)
        result = containment.contains(parts, Py)
        assert result.method == SUM_INBODY
        assert result.lossless
        assert result.verdict in (CONTAINED, REFUTED)
        assert result.contained == containment_oracle(minkowski_sum_all(parts), Py)
        if result.contained:
            assert containment.certificate_ok(result.certificate, parts, Py)


LOSSLESS_SUITES = [_h_in_h_suite, _ah_in_h_suite, _ah_in_ah_suite, _sum_inbody_suite]


@pytest.mark.parametrize("suite", LOSSLESS_SUITES)
def test_lossless_routes_agree_with_oracle(suite, rng):
    suite(rng, 20)


@pytest.mark.slow
@pytest.mark.parametrize("suite", LOSSLESS_SUITES)
def test_lossless_routes_agree_with_oracle_many(suite, rng):
    suite(rng, 200)


# ------------------------------------------------------- sufficient routes

def random_ah_polytope(rng, n, latent, rank=None):
    """<c, Y P> with Y of size n x latent (rank-deficient when rank < n) over a bounded random base"""
    base = HPolytope(np.vstack([np.eye(latent), -np.eye(latent), rng.normal(size=(latent + 1, latent))]),
                     rng.uniform(0.8, 1.5, size=3 * latent + 1))
    Y = rng.normal(size=(n, latent)) + np.eye(n, latent)
    if rank is not None:
        U, sv, Vt = np.linalg.svd(Y, full_matrices=False)
        Y = (U[:, :rank] * sv[:rank]) @ Vt[:rank]
    return AHPolytope(rng.uniform(-0.2, 0.2, size=n), Y, base)


def _check_sound(result, inbody, circumbody):
    assert result.verdict != REFUTED or result.lossless
    if result.contained:
        assert containment_oracle(inbody, circumbody)
        assert containment.certificate_ok(result.certificate, inbody, circumbody)
    elif result.verdict == REFUTED:
        assert not containment_oracle(inbody, circumbody)


def _soundness_suite(rng, trials, n=2):
    verdicts = set()
    for _ in range(trials):
        Zy = random_zonotope(rng, n=n, cols=n + 2)
        Zx = random_zonotope(rng, n=n, scale=rng.uniform(0.1, 0.9), center_scale=0.1)
        result = containment.contains(Zx, Zy, method=ZONOTOPE)
        verdicts.add(result.verdict)
        assert result.verdict != REFUTED
        _check_sound(result, Zx, Zy)

        # general AH circumbody with a wide map, then one whose map drops rank
        circ = random_ah_polytope(rng, n, n + 1)
        _check_sound(containment.contains(Zx, circ, method=AH_IN_AH), Zx, circ)
        flat = random_ah_polytope(rng, n, n, rank=n - 1)
        direction = flat.map[:, :1]
        segment = Zonotope(flat.center, rng.uniform(0.05, 1.0) * direction)
        _check_sound(containment.contains(segment, flat, method=AH_IN_AH), segment, flat)

        parts = [random_zonotope(rng, n=n, cols=2, scale=0.6) for _ in range(2)]
        X = random_zonotope(rng, n=n, scale=rng.uniform(0.2, 1.2), center_scale=0.1)
        result = containment.contains(X, parts, kind=SUM)
        if result.contained:
            assert containment_oracle(X, minkowski_sum_all(parts))
            assert containment.certificate_ok(result.certificate, X, parts)

        result = containment.contains(X, parts, kind=HULL_OF, method=HULL)
        if result.contained:
            assert _in_hull(parts, X)
            assert containment.certificate_ok(result.certificate, X, parts)
        result = containment.contains(X, parts, kind=HULL_OF)
        assert result.method == ZONOTOPE_HULL
        if result.contained:
            assert _in_hull(parts, X)
            assert result.certificate.mixers_valid()

        result = containment.contains(X, parts, kind=DISJUNCTION)
        assert result.method == ZONOTOPE_DISJUNCTIVE
        assert result.verdict != REFUTED
        if result.contained:
            assert containment_oracle(X, parts[int(np.argmax(result.certificate.mixers))])
    return verdicts


def test_sufficient_routes_are_sound(rng):
    verdicts = _soundness_suite(rng, 20)
    assert verdicts == {CONTAINED, NOT_CERTIFIED}


def test_sufficient_routes_are_sound_in_three_dimensions(rng):
    _soundness_suite(rng, 5, n=3)


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3])
def test_sufficient_routes_are_sound_many(n, rng):
    # 250 instances per dimension
    _soundness_suite(rng, 250, n=n)


def _agreement_suite(rng, trials):
    agreed = set()
    for _ in range(trials):
        Zy = random_zonotope(rng, cols=4)
        Zx = random_zonotope(rng, scale=rng.uniform(0.1, 0.9), center_scale=0.1)
        via_generators = containment.contains(Zx, Zy, method=ZONOTOPE).contained
        assert containment.contains(Zx, Zy, method=AH_IN_AH).contained == via_generators
        agreed.add(via_generators)
    return agreed


def test_zonotope_and_general_encodings_agree(rng):
    assert _agreement_suite(rng, 20) == {True, False}


@pytest.mark.slow
def test_zonotope_and_general_encodings_agree_many(rng):
    _agreement_suite(rng, 200)


def test_hull_of_h_polytopes():
    left = translate(unit_box(2), [-1.0, 0.0])
    right = translate(unit_box(2), [1.0, 0.0])
    parts = [HPolytope(np.vstack([np.eye(2), -np.eye(2)]), [0.0, 1.0, 2.0, 1.0]),
             HPolytope(np.vstack([np.eye(2), -np.eye(2)]), [2.0, 1.0, 0.0, 1.0])]
    box = HPolytope(np.vstack([np.eye(2), -np.eye(2)]), [0.9, 0.5, 0.9, 0.5])
    result = containment.contains(box, parts, kind=HULL_OF)
    assert result.method == H_HULL
    assert result.contained
    assert result.certificate.mixers_valid()
    assert containment.certificate_ok(result.certificate, box, parts)
    assert containment.contains(box, [left, right], kind=HULL_OF).contained


def test_hull_of_points():
    points = [AHPolytope.point([-1.0, 0.0]), AHPolytope.point([1.0, 0.0])]
    midpoint = containment.contains(AHPolytope.point([0.0, 0.0]), points, kind=HULL_OF)
    assert midpoint.method == HULL
    assert midpoint.verdict == CONTAINED
    assert np.allclose(midpoint.certificate.mixers, [0.5, 0.5])
    # any inbody with extent needs a generator the points cannot supply
    segment = Zonotope([0.0, 0.0], [[0.5], [0.0]])
    assert containment.contains(segment, points, kind=HULL_OF).verdict == NOT_CERTIFIED
    assert _in_hull(points, segment)
    box = Zonotope([0.0, 0.0], 0.1 * np.eye(2))
    assert containment.contains(box, points, kind=HULL_OF).verdict == NOT_CERTIFIED


# -------------------------------------------------------------- disjunction

def _disjunction_suite(rng, trials):
    for _ in range(trials):
        parts = [random_polygon(rng, shift=rng.uniform(-1.0, 1.0, size=2)) for _ in range(3)]
        X = random_zonotope(rng, scale=rng.uniform(0.1, 0.5), center_scale=0.8)
        result = containment.contains(X, parts, kind=DISJUNCTION)
        assert result.method == DISJUNCTIVE
        assert result.lossless
        assert result.contained == any(containment_oracle(X, P) for P in parts)
        assert result.contained == any(containment.contains(X, P).contained for P in parts)
        if result.contained:
            d = result.certificate.mixers
            assert result.certificate.mixers_valid()
            assert containment_oracle(X, parts[int(np.argmax(d))])
            assert containment.certificate_ok(result.certificate, X, parts)


def _zonotope_disjunction_suite(rng, trials):
    verdicts = set()
    for _ in range(trials):
        parts = [random_zonotope(rng, cols=3, scale=0.7, center_scale=1.0) for _ in range(3)]
        X = random_zonotope(rng, scale=rng.uniform(0.05, 0.4), center_scale=0.8)
        result = containment.contains(X, parts, kind=DISJUNCTION)
        assert result.method == ZONOTOPE_DISJUNCTIVE
        assert result.verdict != REFUTED
        assert result.contained == any(containment.contains(X, Z, method=ZONOTOPE).contained for Z in parts)
        verdicts.add(result.verdict)
        if result.contained:
            assert result.certificate.mixers_valid()
            assert containment_oracle(X, parts[int(np.argmax(result.certificate.mixers))])
    return verdicts


def test_disjunction_matches_exhaustive_check(rng):
    _disjunction_suite(rng, 15)


@pytest.mark.slow
def test_disjunction_matches_exhaustive_check_many(rng):
    _disjunction_suite(rng, 200)


def test_zonotope_disjunction_matches_per_part_checks(rng):
    assert _zonotope_disjunction_suite(rng, 15) == {CONTAINED, NOT_CERTIFIED}


@pytest.mark.slow
def test_zonotope_disjunction_matches_per_part_checks_many(rng):
    _zonotope_disjunction_suite(rng, 100)


def test_union_is_not_the_hull():
    left = HPolytope(np.vstack([np.eye(2), -np.eye(2)]), [0.0, 1.0, 2.0, 1.0])
    right = HPolytope(np.vstack([np.eye(2), -np.eye(2)]), [2.0, 1.0, 0.0, 1.0])
    straddling = Zonotope([0.0, 0.0], 0.5 * np.eye(2))
    assert containment.contains(straddling, [left, right], kind=HULL_OF).contained
    assert containment.contains(straddling, [left, right], kind=DISJUNCTION).verdict == REFUTED
    inside_left = Zonotope([-1.0, 0.0], 0.5 * np.eye(2))
    result = containment.contains(inside_left, [left, right], kind=DISJUNCTION)
    assert result.contained
    assert np.allclose(result.certificate.mixers, [1.0, 0.0])


def test_zonotope_disjunction():
    parts = [Zonotope([-2.0, 0.0], np.eye(2)), Zonotope([2.0, 0.0], np.eye(2))]
    result = containment.contains(Zonotope([2.0, 0.5], 0.4 * np.eye(2)), parts, kind=DISJUNCTION)
    assert result.method == ZONOTOPE_DISJUNCTIVE
    assert result.contained
    assert np.allclose(result.certificate.mixers, [0.0, 1.0])
    result = containment.contains(Zonotope([0.0, 0.0], 0.4 * np.eye(2)), parts, kind=DISJUNCTION)
    assert result.verdict == NOT_CERTIFIED


# ------------------------------------------------------------------ scaling

def test_max_scaling_values():
    lam, cert = containment.max_scaling(unit_box(2), HPolytope(unit_box(2).H, 2 * np.ones(4)))
    assert np.isclose(lam, 2.0)
    assert np.isclose(cert.scale, 2.0)

    lam, cert = containment.max_scaling(AHPolytope.point([0.0, 0.0]), unit_box(2))
    assert np.isinf(lam)
    assert cert is None

    lam, cert = containment.max_scaling(Zonotope([5.0, 5.0], np.eye(2)), Zonotope([0.0, 0.0], np.eye(2)),
                                        method=ZONOTOPE)
    assert lam == 0.0
    assert cert is None


def test_max_scaling_by_bisection_for_disjunction():
    near = HPolytope(unit_box(2).H, 2 * np.ones(4))
    far = HPolytope(unit_box(2).H, [7.0, 7.0, -5.0, -5.0])
    lam, cert = containment.max_scaling(unit_box(2), [far, near], kind=DISJUNCTION)
    assert abs(lam - 2.0) <= 1e-5
    assert np.allclose(cert.mixers, [0.0, 1.0])


def test_max_scaling_is_monotone(rng):
    checked = 0
    for _ in range(10):
        Zy = random_zonotope(rng, cols=4)
        Zx = random_zonotope(rng, scale=rng.uniform(0.1, 0.9), center_scale=0.1)
        lam, _ = containment.max_scaling(Zx, Zy, method=ZONOTOPE)
        if not 0.0 < lam < np.inf:
            continue
        checked += 1
        for factor in (0.25, 0.5, 0.95):
            scaled = Zonotope(Zx.center, factor * lam * Zx.generator)
            assert containment.contains(scaled, Zy, method=ZONOTOPE).contained
        beyond = Zonotope(Zx.center, 1.05 * lam * Zx.generator)
        assert not containment.contains(beyond, Zy, method=ZONOTOPE).contained
    assert checked > 0


# --------------------------------------------------------------- certificates

def test_certificate_round_trip(ex1, tmp_path):
    Zx, Zy, _ = ex1
    cert = containment.contains(Zx, Zy, method=AH_IN_AH).certificate
    path = str(tmp_path / "cert.json")
    cert.save(path)
    loaded = ContainmentCertificate.load(path)
    assert loaded.encoding_tag == AH_IN_AH
    assert np.allclose(loaded.gammas[0], cert.gammas[0])
    assert np.allclose(loaded.lambdas[0], cert.lambdas[0])
    assert containment.certificate_ok(loaded, Zx, Zy)


def test_tampered_certificate_fails_replay(ex1):
    Zx, Zy, _ = ex1
    cert = containment.contains(Zx, Zy, method=ZONOTOPE).certificate
    cert.betas[0] = cert.betas[0] + 10.0
    assert not containment.certificate_ok(cert, Zx, Zy)
    with pytest.raises(InvalidInputError):
        containment.interpretation_check(ContainmentCertificate(H_IN_H), Zx, Zy)
    with pytest.raises(InvalidInputError):
        containment.replay_certificate(ContainmentCertificate("mystery"), Zx, Zy)
    with pytest.raises(InvalidInputError):
        ContainmentCertificate.from_dict({"lambdas": []})


# ---------------------------------------------------------------- necessity

def test_necessity_condition():
    box = unit_box(2)
    assert containment.necessity_holds(np.eye(2), box.H)
    assert containment.necessity_holds(np.array([[2.0, 1.0], [0.0, 1.0]]), box.H)
    # a zonotope with more generators than dimensions fails the test
    assert not containment.necessity_holds(np.ones((2, 3)), unit_box(3).H)
    with pytest.raises(DimensionMismatchError):
        containment.necessity_holds(np.eye(2), unit_box(3).H)


# ------------------------------------------------------------------- errors

def test_query_errors(ex1):
    Zx, Zy, _ = ex1
    with pytest.raises(DimensionMismatchError):
        containment.contains(Zx, unit_box(3))
    with pytest.raises(InvalidInputError):
        containment.contains(Zx, Zy, method="telepathy")
    with pytest.raises(InvalidInputError):
        containment.contains(Zx, Zy, kind="intersection")
    with pytest.raises(InvalidInputError):
        containment.contains(Zx, [Zy, Zy])
    with pytest.raises(InvalidInputError):
        containment.contains(Zx, Zy, method=H_IN_H)
    with pytest.raises(InvalidInputError):
        containment.contains(Zx, [Zy], kind=SUM, method=AH_IN_AH)
    with pytest.raises(InvalidInputError):
        containment.contains([Zx, Zx], Zy)
    with pytest.raises(InvalidInputError):
        containment.contains(Zx, [], kind=HULL_OF)


def test_single_element_list_circumbody(ex1):
    Zx, Zy, _ = ex1
    assert containment.contains(Zx, [Zy]).contained
    assert containment.contains(Zx, Zy, kind=SUM).contained
    assert containment.contains(Zx, affine_map(np.eye(2), None, Zy), method=AH_IN_AH).contained


def test_recorded_verdicts(ex1, expected):
    Zx, Zy, Zy_star = ex1
    assert containment.contains(Zx, Zy).verdict == expected["ex1"]["verdict"]
    assert containment.contains(Zx, Zy_star).verdict == expected["ex1"]["verdict_without_last_column"]
