from math import log, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multadv.constructions import search_gamma, tfold_gamma, threshold_gamma
from multadv.exceptions import (
    AllBlocksTrivial,
    BlockSingular,
    LambdaOutOfRange,
    NotPositiveDefinite,
    TrivialRatio,
    VacuousBound,
)
from multadv.linalg import ProjectorSet, relative_spectrum
from multadv.multiplicative import (
    MultiplicativeAdversary,
    bad_projector,
    block_ratio_bound,
    conjugated,
    eta,
    madv2_value,
    madv_from_ratio,
    madv_value,
    ratio_norms,
    validate_mult,
    verify_block_diagonal,
)
from multadv.query import FunctionSpec, builtin

SEARCH4_RATIO = (2.375 + sqrt(2.375 ** 2 - 4)) / 2  # unit determinant, trace 2.375


def test_validate_mult():
    v = validate_mult(np.eye(3))
    assert v.rescale == 1.0
    v = validate_mult(2 * np.eye(3))
    assert v.rescale == pytest.approx(2.0) and np.allclose(v.gamma, np.eye(3))
    v = validate_mult(search_gamma(4, 2.0).gamma)
    assert v.eig.min == pytest.approx(1.0) and v.eig.max == pytest.approx(2.0)
    with pytest.raises(NotPositiveDefinite):
        validate_mult(np.diag([1.0, -1.0]))


def test_bad_projector_search():
    con = search_gamma(4, 2.0)
    sub = bad_projector(con.gamma, 2.0)
    np.testing.assert_allclose(sub.bad, np.full((4, 4), 0.25), atol=1e-12)
    assert sub.rank == 1 and sub.flagged == 3
    np.testing.assert_allclose(sub.bad + sub.good, np.eye(4), atol=1e-12)


def test_bad_projector_near_one():
    G = np.diag([1.0, 1 + 1e-12, 1 + 5e-13])
    assert bad_projector(G, 1 + 1e-9).rank == 3
    with pytest.raises(LambdaOutOfRange):
        bad_projector(np.diag([1.0, 2.0]), 3.0)
    with pytest.raises(LambdaOutOfRange):
        bad_projector(np.diag([1.0, 2.0]), 1.0)


def test_bad_projector_tfold():
    con = tfold_gamma(8, 2, 2.0)
    assert bad_projector(con.gamma, con.lam).rank == 1


@pytest.mark.parametrize("n", [2, 4, 7, 10])
def test_eta_search(n):
    con = search_gamma(n, 2.0)
    assert eta(bad_projector(con.gamma, con.lam), con.spec) == pytest.approx(1 / n, abs=1e-12)


def test_eta_zero_and_threshold():
    spec = builtin("search", 3)
    assert eta(np.zeros((3, 3)), spec) == 0.0
    con = threshold_gamma(8, 2, 2.0)
    assert eta(bad_projector(con.gamma, con.lam), con.spec) <= 0.5 + 1e-9


def test_ratio_norms_search4():
    con = search_gamma(4, 2.0)
    rep = ratio_norms(con.gamma, con.spec)
    assert rep.ratios[(1, 1)] == pytest.approx(SEARCH4_RATIO, abs=1e-6)
    vals = list(rep.ratios.values())
    assert max(vals) - min(vals) <= 1e-12
    # trace of the 2x2 block product is 2.375 with unit determinant
    r = rep.max
    assert r + 1 / r == pytest.approx(2.375)


def test_ratio_norms_identity():
    spec = builtin("threshold", 4, 2)
    assert all(v == pytest.approx(1.0) for v in ratio_norms(np.eye(spec.size), spec).ratios.values())


def test_madv_values():
    con = search_gamma(4, 2.0)
    assert madv_value(con.gamma, con.spec, 2.0, 0.9) == pytest.approx(log(1.62) / log(SEARCH4_RATIO), abs=1e-6)
    assert madv_value(con.gamma, con.spec, 2.0, 0.9) == pytest.approx(0.80, abs=5e-3)
    with pytest.raises(VacuousBound):
        madv_value(con.gamma, con.spec, 2.0, sqrt(0.5))
    with pytest.raises(TrivialRatio):
        madv_value(np.eye(4), con.spec, 2.0, 0.9)


@pytest.mark.parametrize("n", [64, 256])
def test_madv_search_asymptotic(n):
    zeta = 0.5
    q = 2 / zeta ** 2
    con = search_gamma(n, q)
    # every index gives the same ratio by symmetry
    value = madv_from_ratio(q, zeta, ratio_norms(con.gamma, con.spec, indices=[1]).max)
    target = log(zeta ** 2 * q) * sqrt(q) / (2 * (q - 1)) * sqrt(n)
    assert value >= target * (1 - 3 / sqrt(n))


def test_block_diagonal_reports():
    con = search_gamma(4, 2.0)
    assert verify_block_diagonal(con.gamma, con.spec, 1, ProjectorSet.identity(4)).passed
    assert verify_block_diagonal(con.gamma, con.spec, 1, con.partition(1)).passed
    std = ProjectorSet.from_bases([np.eye(4)[:, [k]] for k in range(4)])
    rep = verify_block_diagonal(con.gamma, con.spec, 1, std)
    assert not rep.passed and rep.worst_gamma is not None


def test_block_ratio_search4():
    con = search_gamma(4, 2.0)
    rep = block_ratio_bound(con.gamma, con.spec, 1, con.partition(1))
    by = {b.label: b for b in rep.blocks}
    assert by["triv"].ratio == pytest.approx(1.0)
    assert by["block"].ratio == pytest.approx(SEARCH4_RATIO, abs=1e-6)
    assert by["block"].bound == pytest.approx(1 + 2 * sqrt(3) / 4)
    assert rep.equality_residual <= 1e-9 and rep.bound_slack >= 0


def test_block_ratio_identity_and_singular():
    spec = builtin("search", 4)
    rep = block_ratio_bound(np.eye(4), spec, 2, search_gamma(4, 2.0).partition(2))
    assert all(b.ratio == pytest.approx(1.0) and b.bound >= 1 for b in rep.blocks)
    Pi = ProjectorSet.from_bases([np.eye(4)[:, :2], np.eye(4)[:, 2:]])
    with pytest.raises(BlockSingular):
        block_ratio_bound(np.diag([1.0, 1.0, 0.0, 0.0]) + 0j, spec, 1, Pi)


@pytest.mark.parametrize("factory,args", [(search_gamma, (4,)), (search_gamma, (6,)), (search_gamma, (8,)),
                                          (tfold_gamma, (6, 2))])
def test_block_equality_and_bound(factory, args):
    con = factory(*args, 2.0)
    for i in range(1, con.spec.n + 1):
        rep = block_ratio_bound(con.gamma, con.spec, i, con.partition(i))
        assert rep.equality_residual <= 1e-9
        assert rep.bound_slack >= -1e-9


@pytest.mark.parametrize("n", [4, 16, 64])
def test_madv2_search_trivial_partition(n):
    zeta = 0.5
    q = 2 / zeta ** 2
    con = search_gamma(n, q)
    parts = {i: ProjectorSet.identity(n) for i in range(1, n + 1)}
    res = madv2_value(con.gamma, con.spec, q, zeta, parts)
    exact = log(zeta ** 2 * q) * n / (2 * (q - 1) * sqrt(n - 1))
    assert res.value == pytest.approx(exact, rel=1e-9)
    assert res.value == pytest.approx(log(zeta ** 2 * q) / (2 * (q - 1)) * sqrt(n), rel=1 / n)


def test_madv2_threshold_weaker():
    con = threshold_gamma(8, 2, 2.0)
    zeta = 0.9
    res = madv2_value(con.gamma, con.spec, con.lam, zeta, con.partitions())
    full = madv_value(con.gamma, con.spec, con.lam, zeta)
    assert 0 < res.value <= full + 1e-6


def test_madv2_identity():
    spec = builtin("search", 4)
    with pytest.raises(AllBlocksTrivial):
        madv2_value(np.eye(4), spec, 2.0, 0.9, {1: ProjectorSet.identity(4)})


def test_estimator():
    con = search_gamma(4, 2.0)
    est = MultiplicativeAdversary(con.gamma, zeta=0.9).fit(con.spec)
    assert est.lambda_value_ == pytest.approx(2.0)
    assert est.eta_ == pytest.approx(0.25)
    assert est.score() == pytest.approx(0.7998, abs=1e-3)
    assert est.success_threshold_ == pytest.approx(0.25 + 3.6)
    scaled = MultiplicativeAdversary(3 * con.gamma, lam=6.0, zeta=0.9).fit(con.spec)
    assert scaled.rescale_factor_ == pytest.approx(3.0) and scaled.score() == pytest.approx(est.score())


def test_spectral_identity_and_determinant():
    con = threshold_gamma(5, 2, 2.0)
    G = con.gamma
    for i in range(1, 6):
        Gi = conjugated(G, con.spec, i)
        direct = np.sort(np.linalg.eigvals(Gi @ np.linalg.inv(G)).real)
        np.testing.assert_allclose(direct, relative_spectrum(Gi, G), atol=1e-9)
        assert np.prod(relative_spectrum(Gi, G)) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=20)
@given(st.floats(1.01, 3.0), st.floats(0.0, 1.0))
def test_eta_monotone_in_lambda(lam_a, frac):
    con = threshold_gamma(6, 3, 3.0)
    top = float(np.linalg.eigvalsh(con.gamma)[-1])
    lam_a = min(lam_a, top)
    lam_b = lam_a + frac * (top - lam_a)
    a, b = bad_projector(con.gamma, lam_a), bad_projector(con.gamma, lam_b)
    assert a.rank <= b.rank
    assert eta(a, con.spec) <= eta(b, con.spec) + 1e-12


@settings(max_examples=20)
@given(st.permutations(range(10)))
def test_madv_relabel_invariant(perm):
    con = tfold_gamma(5, 2, 2.0)
    perm = np.array(perm)
    spec = con.spec
    relabelled = FunctionSpec(spec.n, 2, [spec.inputs[k] for k in perm], [spec.values[k] for k in perm],
                              spec.outputs)
    G = con.gamma[np.ix_(perm, perm)]
    assert madv_value(G, relabelled, con.lam, 0.9) == pytest.approx(madv_value(con.gamma, spec, con.lam, 0.9))
