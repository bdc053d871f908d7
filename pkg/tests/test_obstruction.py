import json
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg

from asymrep import load_group_data
from asymrep.bar_complex import Chain, boundary3, cup_cocycle, kronecker_pair
from asymrep.errors import CannotVerifyError, IntegrityError
from asymrep.group_model import check_hom
from asymrep.obstruction import (
    THRESHOLD,
    canonical_json,
    certify_nonstable,
    expected_pairing,
    obstruction_cocycle,
    recheck_certificate,
    winding_pair,
)
from asymrep.voiculescu import AsymptoticRep

from conftest import commuting_pair, rand_word
from test_bar_complex import random_chain


def genuine_rep(G, A, B):
    """Representation of Z^2 sending a -> A, b -> B (A and B commute)."""

    def rho(w):
        if isinstance(w, str):
            w = G.parse(w)
        ea, eb = w.exponent_sums(2)
        return np.linalg.matrix_power(A, ea) @ np.linalg.matrix_power(B, eb)

    return rho


def twisted(R, chars):
    """``rho_n`` times a scalar character ``exp(2 pi i sum theta_k phi_k(w))``."""

    def rho(w):
        phase = sum(theta * phi(w) for theta, phi in chars)
        return np.exp(2j * np.pi * phase) * R(w)

    return rho


class TestWindingPair:
    @pytest.mark.parametrize("n", [7, 8, 16, 33])
    def test_z2_value(self, z2, n):
        res = winding_pair(AsymptoticRep(n, z2.alpha, z2.beta), z2.cycle)
        assert res.valid and res.rounded == 1
        assert abs(res.raw - 1) <= 1e-9

    @pytest.mark.parametrize("n", [8, 16])
    def test_dense_matches_fast(self, z2, n):
        R = AsymptoticRep(n, z2.alpha, z2.beta)
        fast = winding_pair(R, z2.cycle)
        dense = winding_pair(lambda w: R(w), z2.cycle)
        assert dense.rounded == fast.rounded == 1
        assert abs(dense.raw - fast.raw) < 1e-10

    def test_boundary_pairs_to_zero(self, z2):
        G = z2.group
        c = boundary3(Chain.parse(G, [(1, ["a", "a", "b"])]))
        c = Chain(G, 2, c.terms, verified="direct")
        # cell [a^2|b] has rho(ab)rho(a)^-1 rho(b)^-1 = exp(-4 pi i/n) I, outside radius 1 at n = 8
        R8 = AsymptoticRep(8, z2.alpha, z2.beta)
        assert not winding_pair(R8, c).valid
        raw = sum(x * np.trace(scipy.linalg.logm(R8(G.multiply(a, b)) @ np.linalg.inv(R8(b)) @ np.linalg.inv(R8(a))))
                  for x, (a, b) in c)
        assert abs(raw) < 1e-10
        R16 = AsymptoticRep(16, z2.alpha, z2.beta)
        res = winding_pair(lambda w: R16(w), c)
        assert res.valid and res.rounded == 0

    @pytest.mark.parametrize("n", [4, 6])
    def test_radius_condition(self, z2, n):
        res = winding_pair(AsymptoticRep(n, z2.alpha, z2.beta), z2.cycle)
        assert not res.valid
        assert res.raw is None
        assert res.max_defect == pytest.approx(2 * math.sin(math.pi / n))
        assert "radius" in res.diagnostic

    def test_genuine_rep_is_zero(self, z2, rng):
        A, B = commuting_pair(5, rng)
        res = winding_pair(genuine_rep(z2.group, A, B), z2.cycle)
        assert res.valid and res.rounded == 0 and abs(res.raw) < 1e-10

    def test_single_cell_of_rho_n_is_integral(self, z2):
        # scalar defects have trace n * (-2 pi i m / n): integral even off cycles
        c = Chain.parse(z2.group, [(1, ["b", "a"])])
        res = winding_pair(AsymptoticRep(8, z2.alpha, z2.beta), c)
        assert res.valid and res.raw == pytest.approx(-1)

    def test_integrity_gap_raises(self, z2):
        with pytest.raises(IntegrityError):
            winding_pair(phase_map(z2.group, 0.15), fake_cycle(z2.group))

    def test_small_gap_soft_fails(self, z2):
        res = winding_pair(phase_map(z2.group, 0.01), fake_cycle(z2.group))
        assert not res.valid and "quantisation" in res.diagnostic
        assert res.raw.real == pytest.approx(-0.01)

    def test_unverified_chain_reports_raw(self, z2):
        c = Chain.parse(z2.group, [(1, ["a", "b"])])
        res = winding_pair(phase_map(z2.group, 0.15), c)
        assert res.valid and res.raw.real == pytest.approx(-0.15)


def phase_map(G, t):
    """1x1 map with rho(ab) rho(b)^-1 rho(a)^-1 = exp(-2 pi i t) on the cell [a|b]."""

    def rho(w):
        w = G.normalize(G.parse(w) if isinstance(w, str) else w)
        return np.array([[np.exp(-2j * np.pi * t)]]) if w == G.parse("a b") else np.eye(1)

    return rho


def fake_cycle(G):
    return Chain.parse(G, [(1, ["a", "b"])], verified="direct")


class TestInvariance:
    def test_randomised_cycles(self, z2, rng):
        G = z2.group
        checked = 0
        for n in (8, 16):
            R = AsymptoticRep(n, z2.alpha, z2.beta)
            sigma = obstruction_cocycle(z2.alpha, z2.beta)
            while checked < (250 if n == 8 else 500):
                d = random_chain(G, 3, rng, terms=2, max_len=2)
                c = Chain(G, 2, (z2.cycle + boundary3(d)).terms, verified="direct")
                res = winding_pair(R, c)
                if not res.valid:
                    continue  # some cells of c + d3 d violate the radius condition
                checked += 1
                assert abs(res.raw - res.rounded) <= 1e-6
                assert res.rounded == kronecker_pair(sigma, c) == 1

    def test_scalar_characters(self, z2, rng):
        G = z2.group
        for n in (8, 16):
            R = AsymptoticRep(n, z2.alpha, z2.beta)
            for _ in range(20):
                phi = check_hom(G, rng.integers(-3, 4, 2))
                rho = twisted(R, [(rng.random(), phi)])
                res = winding_pair(rho, z2.cycle)
                assert res.valid and res.rounded == 1

    @pytest.mark.parametrize("n", [8, 16])
    def test_commuting_reps_annihilate(self, z2, rng, n):
        for _ in range(10):
            A, B = commuting_pair(n, rng)
            res = winding_pair(genuine_rep(z2.group, A, B), z2.cycle)
            assert res.valid and res.rounded == 0


class TestExpected:
    def test_values(self, z2):
        sigma = obstruction_cocycle(z2.alpha, z2.beta)
        assert expected_pairing(sigma, z2.cycle, 16, 16) == 1
        zero = cup_cocycle(z2.alpha, check_hom(z2.group, [0, 0]))
        assert expected_pairing(zero, z2.cycle, 16, 16) == 0

    def test_scaled(self, z2):
        sigma = 3 * obstruction_cocycle(z2.alpha, z2.beta)
        assert expected_pairing(sigma, z2.cycle, 2 * 10, 10) == Fraction(6)

    def test_sign_conventions_agree_on_cycle(self, z2):
        # -beta(g)alpha(h) and alpha(g)beta(h) differ by a coboundary plus antisymmetry
        assert kronecker_pair(obstruction_cocycle(z2.alpha, z2.beta), z2.cycle) == kronecker_pair(
            cup_cocycle(z2.alpha, z2.beta), z2.cycle
        )


class TestCertificates:
    def test_z2(self, z2):
        cert = certify_nonstable(z2.group, z2.alpha, z2.beta, z2.cycle, [8, 16, 32, 64])
        assert cert.verdict
        assert all(r.rounded == 1 for r in cert.results)
        d = cert.to_json()
        assert d["threshold"] == pytest.approx(1 / 24)
        assert d["support"] == ["a", "b", "a b"]
        assert "1/24" in d["conclusion"]

    def test_beta_zero(self, z2):
        zero = check_hom(z2.group, [0, 0])
        cert = certify_nonstable(z2.group, z2.alpha, zero, z2.cycle, [8])
        assert not cert.verdict
        assert cert.sigma_kronecker == 0

    def test_small_n_invalid(self, z2):
        cert = certify_nonstable(z2.group, z2.alpha, z2.beta, z2.cycle, [4, 8])
        assert not cert.verdict
        assert any("n=4" in d for d in cert.diagnostics)

    def test_needs_verified_cycle(self, z2):
        with pytest.raises(CannotVerifyError):
            certify_nonstable(z2.group, z2.alpha, z2.beta, Chain(z2.group, 2, z2.cycle.terms), [8])

    def test_canonical_and_recheck(self, z2):
        cert = certify_nonstable(z2.group, z2.alpha, z2.beta, z2.cycle, [32, 8, 16])
        text = cert.dumps()
        assert text == canonical_json(json.loads(text))
        ok, fresh = recheck_certificate(json.loads(text))
        assert ok and fresh.dumps() == text

    def test_tampered_certificate(self, z2):
        d = json.loads(certify_nonstable(z2.group, z2.alpha, z2.beta, z2.cycle, [8]).dumps())
        d["results"][0]["rounded"] = 2
        assert not recheck_certificate(d)[0]

    @pytest.mark.parametrize("name", ["thompson_f", "surface_genus2"])
    def test_shipped_groups_pair_to_one(self, name):
        ds = load_group_data(name)
        cert = certify_nonstable(ds.group, ds.alpha, ds.beta, ds.cycle, [7, 8, 16, 64])
        assert cert.verdict, cert.diagnostics
        assert cert.sigma_kronecker == 1
        ok, _ = recheck_certificate(json.loads(cert.dumps()))
        assert ok

    def test_threshold(self):
        assert THRESHOLD == 1 / 24
