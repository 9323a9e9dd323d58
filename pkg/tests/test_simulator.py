import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multadv.additive import complete_adversary, principal_eigenvector
from multadv.constructions import search_gamma
from multadv.exceptions import DimensionMismatch, ImaginaryResidue, IncompleteProjectors, NonUnitary
from multadv.linalg import ProjectorSet
from multadv.multiplicative import bad_projector, ratio_norms
from multadv.query import builtin
from multadv.simulator import (
    AlgorithmSpec,
    grover_algorithm,
    grover_optimal_iterations,
    grover_success,
    index_projectors,
    progress,
    random_algorithm,
    reduced_input_density,
    run,
    success_probability,
    trace_progress,
)


def uniform(size):
    return np.full(size, 1 / np.sqrt(size), dtype=complex)


def test_trivial_algorithm_initial_state():
    spec = builtin("search", 3)
    alg = AlgorithmSpec((np.eye(6),), 3)
    delta = uniform(3)
    (state,) = run(alg, spec, delta)
    expected = np.zeros((3, 3, 2, 1), dtype=complex)
    expected[:, 0, 0, 0] = delta
    np.testing.assert_allclose(state.amplitudes, expected)
    np.testing.assert_allclose(reduced_input_density(state), np.full((3, 3), 1 / 3))


def test_identity_unitaries_keep_state():
    spec = builtin("search", 4)
    alg = AlgorithmSpec((np.eye(8),) * 4, 4)
    states = run(alg, spec, uniform(4))
    for s in states[1:]:
        np.testing.assert_allclose(s.amplitudes, states[0].amplitudes)


def test_algorithm_validation():
    with pytest.raises(NonUnitary):
        AlgorithmSpec((2 * np.eye(4),), 2)
    with pytest.raises(DimensionMismatch):
        AlgorithmSpec((np.eye(5),), 2)
    alg = AlgorithmSpec((np.eye(4),), 2)
    with pytest.raises(DimensionMismatch):
        run(alg, builtin("search", 3), uniform(3))
    with pytest.raises(DimensionMismatch):
        run(alg, builtin("search", 2), uniform(3))


@pytest.mark.parametrize("n,k", [(4, 1), (16, 3), (64, 6), (8, 2), (5, 0)])
def test_grover_matches_formula(n, k):
    spec = builtin("search", n)
    alg = grover_algorithm(n, k)
    final = run(alg, spec, uniform(n))[-1]
    assert success_probability(final, spec, alg.output_projectors) == pytest.approx(grover_success(n, k), abs=1e-12)


def test_grover_exact_cases():
    spec = builtin("search", 4)
    alg = grover_algorithm(4, 1)
    assert success_probability(run(alg, spec, uniform(4))[-1], spec, alg.output_projectors) >= 0.999
    assert grover_success(7, 0) == pytest.approx(1 / 7)
    assert grover_optimal_iterations(4) == 1


def test_reduced_density_formula():
    rng = np.random.default_rng(5)
    spec = builtin("search", 3)
    alg = random_algorithm(7, 2, 2, 3)
    delta = rng.normal(size=3) + 1j * rng.normal(size=3)
    delta /= np.linalg.norm(delta)
    for s in run(alg, spec, delta):
        full = s.amplitudes.reshape(3, -1)
        psi = full / delta[:, None]
        rho = np.array([[delta[x] * np.conj(delta[y]) * np.vdot(psi[y], psi[x]) for y in range(3)]
                        for x in range(3)])
        got = reduced_input_density(s)
        np.testing.assert_allclose(got, rho, atol=1e-12)
        assert np.trace(got).real == pytest.approx(1.0)
        assert np.min(np.linalg.eigvalsh(got)) >= -1e-12


def test_product_state_rank_one():
    spec = builtin("search", 3)
    alg = random_algorithm(1, 1, 1, 3)
    delta = np.array([0, 1, 0], dtype=complex)
    rho = reduced_input_density(run(alg, spec, delta)[-1])
    expected = np.zeros((3, 3))
    expected[1, 1] = 1
    np.testing.assert_allclose(rho, expected, atol=1e-12)


def test_progress_checks():
    rho = np.full((3, 3), 1 / 3)
    assert progress(np.eye(3), rho) == pytest.approx(1.0)
    with pytest.raises(ImaginaryResidue):
        progress(np.array([[0, 1j, 0], [0, 0, 0], [0, 0, 0]]), rho)
    with pytest.raises(DimensionMismatch):
        progress(np.eye(2), rho)


def test_progress_initial_values():
    spec = builtin("search", 4)
    G = complete_adversary(spec)
    v = principal_eigenvector(G)
    alg = random_algorithm(0, 1, 1, 4)
    rho0 = reduced_input_density(run(alg, spec, v)[0])
    assert progress(G, rho0) == pytest.approx(np.linalg.norm(G, 2))
    con = search_gamma(4, 2.0)
    w, V = np.linalg.eigh(con.gamma)
    rho0 = reduced_input_density(run(alg, spec, V[:, 0])[0])
    assert progress(con.gamma, rho0) == pytest.approx(1.0)


def test_success_probability_projector_checks():
    spec = builtin("search", 2)
    alg = grover_algorithm(2, 0)
    state = run(alg, spec, uniform(2))[-1]
    bad = ProjectorSet.from_bases([np.eye(4)[:, :1]], ("1",))
    with pytest.raises(IncompleteProjectors):
        success_probability(state, spec, bad)


def test_uniform_guess():
    # a Hadamard-spread guess register, independent of the input
    spec = builtin("search", 4)
    n, dim_W = 4, 4
    I_q = np.eye(n * 2)
    bases = [np.kron(I_q, np.eye(dim_W)[:, [b]]) for b in range(dim_W)]
    guess = ProjectorSet.from_bases(bases, ("1", "2", "3", "4"))
    U0 = np.kron(np.eye(n * 2), np.full((dim_W, dim_W), 0.5) * np.array([[1, 1, 1, 1], [1, -1, 1, -1],
                                                                          [1, 1, -1, -1], [1, -1, -1, 1]]))
    alg = AlgorithmSpec((U0,), n, 2, dim_W, guess)
    state = run(alg, spec, uniform(4))[-1]
    assert success_probability(state, spec, guess) == pytest.approx(0.25)


def test_bad_subspace_success_bound():
    n = 5
    spec = builtin("search", n)
    con = search_gamma(n, 2.0)
    bad = bad_projector(con.gamma, con.lam)
    w, V = np.linalg.eigh(bad.bad)
    v = V[:, -1]
    alg = grover_algorithm(n, 0)
    p = success_probability(run(alg, spec, v)[0], spec, alg.output_projectors)
    assert p <= 1 / n + 1e-12


def test_identity_gamma_constant_trace():
    spec = builtin("threshold", 4, 2)
    alg = random_algorithm(9, 4, 2, 4)
    tr = trace_progress(alg, spec, np.eye(spec.size), uniform(spec.size))
    np.testing.assert_allclose(tr.W, np.ones(5))
    assert tr.T == 4 and tr.skipped == 0


def test_search_ratio_and_difference_bounds():
    spec = builtin("search", 4)
    con = search_gamma(4, 2.0)
    limit = ratio_norms(con.gamma, spec).max
    G = complete_adversary(spec)
    step = 2 * max(np.linalg.norm(G * (spec.digits[:, i, None] != spec.digits[None, :, i]), 2)
                   for i in range(4))
    for alg in [grover_algorithm(4, 3)] + [random_algorithm(s, 3, 2, 4) for s in range(20)]:
        tr = trace_progress(alg, spec, con.gamma, uniform(4))
        assert np.all(tr.ratios <= limit + 1e-9)
        tr = trace_progress(alg, spec, G, principal_eigenvector(G))
        assert np.all(tr.differences <= step + 1e-9)


def test_random_algorithm_deterministic():
    a, b = random_algorithm(42, 3, 2, 3), random_algorithm(42, 3, 2, 3)
    for U, V in zip(a.unitaries, b.unitaries):
        assert np.array_equal(U, V)
    assert not np.allclose(a.unitaries[0], random_algorithm(43, 3, 2, 3).unitaries[0])


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
def test_norm_preserved(seed, T, dim_W):
    spec = builtin("or", 3)
    rng = np.random.default_rng(seed)
    delta = rng.normal(size=spec.size) + 1j * rng.normal(size=spec.size)
    delta /= np.linalg.norm(delta)
    for s in run(random_algorithm(seed, T, dim_W, 3), spec, delta):
        assert s.norm == pytest.approx(1.0, abs=1e-12)


def test_csv_columns():
    spec = builtin("search", 4)
    tr = trace_progress(grover_algorithm(4, 2), spec, search_gamma(4, 2.0).gamma, uniform(4))
    lines = tr.to_csv().splitlines()
    assert lines[0] == "step,W,ratio,difference"
    assert len(lines) == 4 and lines[1].endswith(",,")


def test_index_projectors_complete():
    P = index_projectors(3, 2, 2)
    assert np.allclose(sum(P.projectors), np.eye(12))
