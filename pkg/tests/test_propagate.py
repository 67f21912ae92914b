import math

import numpy as np
import pytest

from bentchain import BendSpec, ChainSpec, Protocol, build_hamiltonian, evolve, first_maximum
from bentchain.propagate import (
    dump_trace_csv,
    end_probability_at,
    end_probability_on_grid,
)


def p2(n):
    return ChainSpec(Protocol.PROTOCOL_2, n)


def rk4_site_probs(ham, t_end, dt):
    """Independent oracle: classic fixed-step RK4 on the amplitude ODE
    i dA/dt = H A."""
    h = ham.matrix
    n_steps = int(math.ceil(t_end / dt))
    dt = t_end / n_steps
    a = np.zeros(h.shape[0], dtype=complex)
    a[0] = 1.0

    def f(y):
        return -1j * (h @ y)

    for _ in range(n_steps):
        k1 = f(a)
        k2 = f(a + 0.5 * dt * k1)
        k3 = f(a + 0.5 * dt * k2)
        k4 = f(a + dt * k3)
        a = a + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return np.abs(a) ** 2


class TestEvolve:
    def test_initial_condition(self):
        trace = evolve(build_hamiltonian(p2(6)), t_end=1.0, n_steps=128)
        np.testing.assert_allclose(trace.amplitudes[0], np.eye(6)[0], atol=1e-12)
        assert trace.p_end[0] <= 1e-15

    def test_two_site_rabi(self):
        ham = build_hamiltonian(p2(2))
        assert math.isclose(end_probability_at(ham, math.pi / 2), 1.0, abs_tol=1e-12)
        # sin^2 at an intermediate point
        assert math.isclose(
            end_probability_at(ham, 0.3), math.sin(0.3) ** 2, abs_tol=1e-12
        )

    def test_three_site_closed_form(self):
        # A_3(t) = -sin^2(t) from diagonalizing the 3x3 matrix
        ham = build_hamiltonian(p2(3))
        trace = evolve(ham, t_end=math.pi / 2, n_steps=200)
        np.testing.assert_allclose(
            trace.amplitudes[:, 2], -np.sin(trace.times) ** 2, atol=1e-12
        )
        assert math.isclose(
            end_probability_at(ham, math.pi / 4), 0.25, abs_tol=1e-10
        )

    @pytest.mark.parametrize("n", range(2, 13))
    def test_protocol2_closed_form(self, n):
        # p_end(t) = sin^(2(N-1))(t) for the engineered couplings
        ham = build_hamiltonian(p2(n))
        times, p = end_probability_on_grid(ham, math.pi / 2, 500)
        np.testing.assert_allclose(p, np.sin(times) ** (2 * (n - 1)), atol=1e-8)

    def test_rejects_bad_window(self):
        ham = build_hamiltonian(p2(4))
        with pytest.raises(ValueError):
            evolve(ham, t_end=math.inf)
        with pytest.raises(ValueError):
            evolve(ham, t_end=-1.0)
        with pytest.raises(ValueError):
            evolve(ham, t_end=1.0, n_steps=50)

    @pytest.mark.parametrize(
        "n,alpha,kappa,delta",
        [(5, 3, 0.4, 0.0), (12, 6, 0.9, -3.0), (25, 2, 1.0, -8.0)],
    )
    def test_unitarity(self, n, alpha, kappa, delta):
        ham = build_hamiltonian(
            p2(n), BendSpec(alpha=alpha, kappa=kappa, delta_alpha=delta)
        )
        trace = evolve(ham, t_end=10.0, n_steps=512)
        np.testing.assert_allclose(trace.norms(), 1.0, atol=1e-10)

    def test_rk4_cross_check(self):
        ham = build_hamiltonian(p2(7), BendSpec(alpha=4, kappa=0.5))
        om = np.abs(ham.matrix).max()
        t_end = math.pi / 2
        oracle = rk4_site_probs(ham, t_end, dt=1e-3 / om)
        trace = evolve(ham, t_end, n_steps=128)
        np.testing.assert_allclose(
            np.abs(trace.amplitudes[-1]) ** 2, oracle, atol=1e-6
        )


class TestFirstMaximum:
    def test_perfect_transfer_window_end(self):
        ham = build_hamiltonian(p2(5))
        trace = evolve(ham, t_end=math.pi / 2, n_steps=256)
        fm = first_maximum(trace, ham)
        assert math.isclose(fm.t_star, math.pi / 2, rel_tol=1e-8)
        assert fm.p_star >= 1 - 1e-8

    def test_two_site(self):
        ham = build_hamiltonian(p2(2))
        trace = evolve(ham, t_end=2.0, n_steps=256)
        fm = first_maximum(trace, ham)
        assert math.isclose(fm.t_star, math.pi / 2, rel_tol=1e-8)
        assert math.isclose(fm.p_star, 1.0, abs_tol=1e-12)

    def test_bend_accelerates(self):
        # dense-grid scan as oracle for the refined answer
        ham = build_hamiltonian(p2(9), BendSpec(alpha=5, kappa=0.4))
        trace = evolve(ham, t_end=math.pi / 2, n_steps=4096)
        fm = first_maximum(trace, ham)
        assert fm.t_star < math.pi / 2
        times, p = end_probability_on_grid(ham, math.pi / 2, 100_000)
        i = int(np.argmax(p))
        assert math.isclose(fm.t_star, times[i], abs_tol=1e-3)
        assert fm.p_star >= p[i] - 1e-12

    def test_grid_independence(self):
        ham = build_hamiltonian(p2(11), BendSpec(alpha=6, kappa=0.7))
        fm_a = first_maximum(evolve(ham, math.pi / 2, 4096), ham)
        fm_b = first_maximum(evolve(ham, math.pi / 2, 8192), ham)
        assert abs(fm_a.p_star - fm_b.p_star) <= 1e-8

    def test_short_trace_rejected(self):
        ham = build_hamiltonian(p2(4))
        trace = evolve(ham, 1.0, 256)
        stub = type(trace)(
            times=trace.times[:2], amplitudes=trace.amplitudes[:2],
            p_end=trace.p_end[:2],
        )
        with pytest.raises(ValueError):
            first_maximum(stub, ham)


def test_trace_csv_dump(tmp_path):
    ham = build_hamiltonian(p2(3))
    trace = evolve(ham, 1.0, 128)
    path = tmp_path / "trace.csv"
    dump_trace_csv(trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,re_A1,im_A1,re_A2,im_A2,re_A3,im_A3,p_end"
    assert len(lines) == 129
    row0 = lines[1].split(",")
    assert float(row0[0]) == 0.0
    assert math.isclose(float(row0[1]), 1.0, abs_tol=1e-12)
