"""Chain model: parameters, dispersion, transforms, energy."""

import math

import numpy as np
import pytest

from chainwave import model


def random_state(rng, n=11, support_min=-5):
    return model.LatticeState(
        support_min=support_min,
        q=rng.uniform(-1.0, 1.0, n),
        p=rng.uniform(-1.0, 1.0, n),
    )


class TestChainParams:
    def test_omega0_prime(self):
        p = model.ChainParams(omega0=3.0, omega1=2.0)
        assert p.omega0_prime == pytest.approx(5.0)

    def test_omega0_prime_lower_bound(self):
        p = model.ChainParams(omega0=0.0, omega1=1.3)
        assert p.omega0_prime == pytest.approx(2.0 * p.omega1)
        pinned = model.ChainParams(omega0=0.7, omega1=1.3)
        assert pinned.omega0_prime > 2.0 * pinned.omega1

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(omega0=0.0, omega1=0.0),
            dict(omega0=-1.0, omega1=1.0),
            dict(omega0=0.0, omega1=1.0, spacing=0.0),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            model.ChainParams(**kwargs)


class TestDispersion:
    def test_unpinned_band_top(self):
        assert model.dispersion(model.ChainParams(0.0, 1.0), math.pi) == pytest.approx(2.0)

    def test_pinned_band_edges(self):
        p = model.ChainParams(3.0, 2.0)
        assert model.dispersion(p, 0.0) == pytest.approx(3.0)
        assert model.dispersion(p, math.pi) == pytest.approx(5.0)

    def test_even_periodic_monotone(self):
        p = model.ChainParams(0.7, 1.1)
        lam = np.linspace(0.0, math.pi, 1000)
        w = model.dispersion(p, lam)
        assert np.all(np.diff(w) > 0.0)
        assert np.all(w >= p.omega0 - 1e-15)
        assert w[-1] == pytest.approx(p.omega0_prime)
        sample = np.linspace(-7.0, 7.0, 173)
        assert model.dispersion(p, -sample) == pytest.approx(
            model.dispersion(p, sample)
        )
        assert model.dispersion(p, sample + 2.0 * math.pi) == pytest.approx(
            model.dispersion(p, sample)
        )


class TestTransforms:
    def test_zero_state(self):
        spectrum = model.forward_transform(model.LatticeState.single_site(0))
        lam = np.linspace(0.0, 2.0 * math.pi, 17)
        assert np.allclose(spectrum.Q(lam), 0.0)
        assert np.allclose(spectrum.P(lam), 0.0)

    def test_delta_at_origin(self):
        spectrum = model.forward_transform(model.LatticeState.single_site(0, q=1.0))
        lam = np.linspace(0.0, 2.0 * math.pi, 17)
        assert np.allclose(spectrum.Q(lam), 1.0)

    def test_delta_at_one(self):
        spectrum = model.forward_transform(model.LatticeState.single_site(1, q=1.0))
        assert spectrum.Q(math.pi) == pytest.approx(-1.0)

    def test_parseval(self):
        rng = np.random.default_rng(3)
        state = random_state(rng)
        spectrum = model.forward_transform(state)
        n = 1 << 10
        lam = 2.0 * math.pi * np.arange(n) / n
        mean_sq = np.mean(np.abs(spectrum.Q(lam)) ** 2)
        assert mean_sq == pytest.approx(state.q_norm() ** 2, rel=1e-12)

    def test_hermitian_symmetry(self):
        rng = np.random.default_rng(4)
        spectrum = model.forward_transform(random_state(rng))
        lam = np.linspace(0.1, 3.0, 23)
        assert np.allclose(spectrum.Q(-lam), np.conj(spectrum.Q(lam)))
        assert np.allclose(spectrum.P(-lam), np.conj(spectrum.P(lam)))

    def test_periodicity(self):
        rng = np.random.default_rng(40)
        spectrum = model.forward_transform(random_state(rng))
        lam = np.linspace(0.0, 2.0 * math.pi, 29)
        assert np.allclose(spectrum.Q(lam + 2.0 * math.pi), spectrum.Q(lam), atol=1e-12)
        assert np.allclose(spectrum.P(lam + 2.0 * math.pi), spectrum.P(lam), atol=1e-12)

    def test_inverse_of_constant(self):
        state = model.LatticeState.single_site(0, q=1.0)
        spectrum = model.forward_transform(state)
        assert model.inverse_transform(spectrum, 0)[0] == pytest.approx(1.0, abs=1e-13)
        assert model.inverse_transform(spectrum, 5)[0] == pytest.approx(0.0, abs=1e-13)

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        state = random_state(rng)
        spectrum = model.forward_transform(state)
        for k in range(state.support_min - 2, state.support_max + 3):
            q_k, p_k = model.inverse_transform(spectrum, k)
            assert q_k == pytest.approx(state.q_at(k), abs=1e-12)
            assert p_k == pytest.approx(state.p_at(k), abs=1e-12)

    def test_grid_representation_round_trip(self):
        rng = np.random.default_rng(6)
        state = random_state(rng)
        trig = model.forward_transform(state)
        n = 256
        lam = 2.0 * math.pi * np.arange(n) / n
        grid = model.grid_pair(trig.Q(lam), trig.P(lam))
        q_k, p_k = model.inverse_transform(grid, 3)
        assert q_k == pytest.approx(state.q_at(3), abs=1e-12)
        assert p_k == pytest.approx(state.p_at(3), abs=1e-12)

    def test_grid_too_coarse_raises(self):
        grid = model.grid_pair(np.ones(16), np.zeros(16))
        with pytest.raises(ValueError, match="mesh"):
            model.inverse_transform(grid, 8)

    def test_json_round_trip(self):
        rng = np.random.default_rng(7)
        state = random_state(rng)
        again = model.LatticeState.from_dict(state.to_dict())
        assert again.support_min == state.support_min
        assert np.array_equal(again.q, state.q)
        assert np.array_equal(again.p, state.p)


class TestEnergy:
    def test_zero_state(self):
        p = model.ChainParams(1.0, 1.0)
        assert model.energy(model.LatticeState.single_site(0), p) == 0.0

    def test_single_displacement_two_bonds(self):
        p = model.ChainParams(0.0, 1.0)
        st = model.LatticeState.single_site(0, q=1.0)
        assert model.energy(st, p) == pytest.approx(1.0)

    def test_single_velocity(self):
        p = model.ChainParams(0.0, 1.0)
        st = model.LatticeState.single_site(0, p=1.0)
        assert model.energy(st, p) == pytest.approx(0.5)

    def test_positive_definite_when_pinned(self):
        rng = np.random.default_rng(8)
        p = model.ChainParams(0.5, 1.0)
        st = random_state(rng)
        assert model.energy(st, p) > 0.0


class TestDisplacement:
    def test_zero(self):
        out = model.displacement_transform(model.LatticeState.single_site(0))
        assert np.allclose(out.q, 0.0)
        assert np.allclose(out.p, 0.0)

    def test_spike(self):
        st = model.LatticeState.single_site(0, q=1.0)
        out = model.displacement_transform(st)
        assert out.q_at(-1) == pytest.approx(1.0)
        assert out.q_at(0) == pytest.approx(-1.0)
        assert sum(abs(out.q_at(k)) > 0 for k in out.sites) == 2

    def test_velocity_sum_telescopes(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            st = random_state(rng, n=rng.integers(1, 15))
            out = model.displacement_transform(st)
            assert model.total_velocity_sum(out) == pytest.approx(0.0, abs=1e-12)


class TestVelocitySum:
    def test_single(self):
        assert model.total_velocity_sum(model.LatticeState.single_site(0, p=1.0)) == 1.0

    def test_cancellation(self):
        st = model.LatticeState(-3, np.zeros(7), np.array([-1.0, 0, 0, 0, 0, 0, 1.0]))
        assert model.total_velocity_sum(st) == 0.0

    def test_random_sum(self):
        rng = np.random.default_rng(10)
        st = random_state(rng, n=7)
        assert model.total_velocity_sum(st) == pytest.approx(float(np.sum(st.p)))


class TestImmutability:
    def test_arrays_frozen(self):
        st = model.LatticeState.single_site(0, q=1.0)
        with pytest.raises(ValueError):
            st.q[0] = 2.0
