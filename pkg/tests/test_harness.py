import math
from dataclasses import replace

import numpy as np
import pytest

from lctur import symplectic as sp
from lctur.entropy import RenyiOrderPair
from lctur.errors import DimensionError, NotIsotropic
from lctur.grid import GridSpec
from lctur.harness import (
    ExperimentSpec,
    random_isotropic_rows,
    run_experiment,
    sweep,
    sweep_to_csv,
    verify_lemma1,
    verify_theorem1,
    verify_theorem1_extended,
    verify_theorem2,
    verify_theorem3,
)
from lctur.states import correlated_gaussian, fock_wavefunction, gaussian_wavefunction, squeezed, vacuum

LN_PI_E = math.log(math.pi * math.e)
GRID = GridSpec.symmetric(512, 12.0)


def rows(*r):
    return sp.QuadratureRowSet(np.array(r, dtype=float))


class TestTheorem1:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_birula_saturation(self, n):
        rep = verify_theorem1(vacuum(n), sp.identity(n), sp.fourier_form(n))
        assert rep.lhs == pytest.approx(n * LN_PI_E, abs=1e-12)
        assert abs(rep.slack) <= 1e-9 and rep.status == "pass"

    @pytest.mark.parametrize("theta,phi", [(0.3, 1.1), (2.0, -0.5), (1.0, 1.0 + 1e-3)])
    def test_rotations(self, theta, phi):
        rep = verify_theorem1(vacuum(1), sp.rotation(theta), sp.rotation(phi))
        assert rep.slack == pytest.approx(-math.log(abs(math.sin(theta - phi))), abs=1e-9)

    def test_fock_one_has_slack(self):
        rep = verify_theorem1(fock_wavefunction(1, GRID), sp.identity(1), sp.fourier_form(1))
        assert rep.path == "grid" and rep.slack > 0.1
        assert rep.diagnostics["norm_drift"] < 1e-8 and rep.diagnostics["edge_mass"] < 1e-6

    def test_forced_grid_path(self):
        rep = verify_theorem1(vacuum(1), sp.identity(1), sp.fourier_form(1), grid=GRID, force_grid=True)
        assert rep.path == "grid" and rep.tolerance == 5e-3
        assert abs(rep.slack) <= 5e-3

    def test_partial_measurement(self):
        state = correlated_gaussian(3, 1)
        rep = verify_theorem1(state, sp.random_symplectic(3, 2), sp.random_symplectic(3, 3), n=2)
        assert (rep.n, rep.N) == (2, 3) and rep.slack >= -1e-9

    def test_vacuous(self):
        A = sp.random_symplectic(2, 5)
        rep = verify_theorem1(correlated_gaussian(2, 5), A, A)
        assert rep.status == "vacuous" and rep.bound == -math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            verify_theorem1(vacuum(1), sp.identity(1), sp.identity(2))


class TestExtended:
    def test_reduces_to_birula(self):
        rep = verify_theorem1_extended(vacuum(2), rows([1, 0, 0, 0]), rows([0, 0, 1, 0]))
        assert rep.bound == pytest.approx(LN_PI_E, abs=1e-12)
        assert abs(rep.slack) <= 1e-9

    def test_mixed_row_matches_scalar_commutator(self):
        # [x1, x1 + p1 + p2] = i
        rep = verify_theorem1_extended(vacuum(2), rows([1, 0, 0, 0]), rows([1, 0, 1, 1]))
        assert rep.diagnostics["scalar_commutator"] == 1.0
        assert rep.bound == pytest.approx(rep.diagnostics["huang_bound"], abs=1e-12)
        assert rep.bound == pytest.approx(LN_PI_E, abs=1e-12)
        assert rep.slack >= 0

    @pytest.mark.parametrize("seed", range(100))
    def test_random_rows_three_modes(self, seed):
        state = correlated_gaussian(3, seed)
        rep = verify_theorem1_extended(state, random_isotropic_rows(2, 3, seed), random_isotropic_rows(2, 3, seed + 1000))
        assert rep.slack >= -1e-9
        assert rep.diagnostics["completion_error"] <= 1e-8

    def test_non_isotropic(self):
        with pytest.raises(NotIsotropic):
            verify_theorem1_extended(vacuum(2), rows([1, 0, 0, 0], [0, 0, 1, 0]), rows([1, 0, 0, 0], [0, 1, 0, 0]))

    def test_random_rows_are_isotropic(self):
        r = random_isotropic_rows(3, 4, 9)
        r.validate(1e-10)
        assert (r.n, r.N) == (3, 4)


class TestLemma1:
    def test_gaussian_fourier(self):
        wf = gaussian_wavefunction(vacuum(1), GRID)
        rep = verify_lemma1(wf, sp.identity(1), sp.fourier_form(1))
        assert rep.lhs == pytest.approx(LN_PI_E, abs=1e-3)
        assert rep.bound == pytest.approx(LN_PI_E, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_one_mode_form(self, seed):
        A = sp.random_symplectic(1, seed, squeeze=0.3, shear=0.3)
        B = sp.random_symplectic(1, seed + 40, squeeze=0.3, shear=0.3)
        rep = verify_lemma1(gaussian_wavefunction(correlated_gaussian(1, seed), GRID), A, B)
        d = rep.diagnostics
        assert d["det_identity_error"] <= 1e-10
        assert d["one_mode_det"] == pytest.approx(d["abs_det_k"], abs=1e-12)
        assert rep.bound == pytest.approx(math.log(math.pi * math.e * d["one_mode_det"]), abs=1e-10)
        assert rep.slack >= -5e-3

    def test_same_matrix(self):
        A = sp.random_symplectic(1, 2)
        rep = verify_lemma1(gaussian_wavefunction(vacuum(1), GRID), A, A)
        assert rep.status == "vacuous"


class TestTheorem2:
    def test_unit_orders_match_theorem1(self):
        for state in (vacuum(2), correlated_gaussian(2, 3)):
            A, B = sp.random_symplectic(2, 1), sp.random_symplectic(2, 2)
            t1 = verify_theorem1(state, A, B)
            for pair in (RenyiOrderPair(1.0, 1.0), RenyiOrderPair.conjugate(1 + 1e-7)):
                t2 = verify_theorem2(state, A, B, pair)
                assert t2.lhs == pytest.approx(t1.lhs, abs=1e-5)
                assert t2.bound == pytest.approx(t1.bound, abs=1e-5)

    def test_order_two_vacuum(self):
        rep = verify_theorem2(vacuum(1), sp.identity(1), sp.fourier_form(1), RenyiOrderPair.conjugate(2.0))
        assert rep.slack >= 0
        assert rep.bound == pytest.approx(2.0995011, abs=1e-7)

    def test_grid_path(self):
        rep = verify_theorem2(fock_wavefunction(1, GRID), sp.identity(1), sp.fourier_form(1), RenyiOrderPair.conjugate(2.0))
        assert rep.path == "grid" and rep.slack >= -5e-3

    @pytest.mark.parametrize("seed", range(10))
    def test_one_mode_matches_rotation_form(self, seed):
        # one-mode LCT bound: ln|ab' - a'b| replaces ln|sin(theta - phi)|
        A, B = sp.random_symplectic(1, seed), sp.random_symplectic(1, seed + 1)
        pair = RenyiOrderPair.conjugate(3.0)
        rep = verify_theorem2(correlated_gaussian(1, seed), A, B, pair)
        det = abs(A.a[0, 0] * B.b[0, 0] - B.a[0, 0] * A.b[0, 0])
        expected = math.log(3) / 4 + math.log(0.6) / (2 * (0.6 - 1)) + math.log(math.pi * det)
        assert rep.bound == pytest.approx(expected, abs=1e-10)
        assert rep.slack >= -1e-9


class TestTheorem3:
    def test_robertson(self):
        rep = verify_theorem3(vacuum(1), sp.identity(1), sp.fourier_form(1))
        assert rep.lhs == pytest.approx(0.5, abs=1e-15) and rep.bound == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("theta", np.linspace(-3, 3, 7))
    def test_vacuum_rotation_slack(self, theta):
        for gap in (0.2, 1.0, np.pi / 2, 2.5):
            rep = verify_theorem3(vacuum(1), sp.rotation(theta + gap), sp.rotation(theta))
            assert rep.slack == pytest.approx((1 - abs(math.sin(gap))) / 2, abs=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_chain_and_ordering(self, seed):
        n = 1 + seed % 3
        state = correlated_gaussian(n, seed)
        A, B = sp.random_symplectic(n, seed + 1), sp.random_symplectic(n, seed + 2)
        rep = verify_theorem3(state, A, B)
        assert rep.diagnostics["entropy_power_holds"] and rep.diagnostics["gaussian_max_holds"]
        assert rep.slack >= -1e-9
        # entropic relation implies the covariance one
        assert verify_theorem1(state, A, B).slack >= -1e-9

    def test_grid_path(self):
        rep = verify_theorem3(fock_wavefunction(1, GRID), sp.identity(1), sp.fourier_form(1))
        # Fock |1>: variance 3/2 in both x and p
        assert rep.lhs == pytest.approx(1.5, abs=1e-6)
        assert rep.path == "grid" and rep.diagnostics["entropy_power_holds"]


class TestSpecAndDispatch:
    def test_missing_alpha(self):
        with pytest.raises(ValueError):
            ExperimentSpec("theorem2")

    def test_missing_rows(self):
        with pytest.raises(ValueError):
            ExperimentSpec("theorem1_extended", n=1, N=2)

    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            ExperimentSpec("theorem9")

    def test_unknown_field(self):
        with pytest.raises(ValueError):
            ExperimentSpec.from_dict({"relation": "birula", "colour": 1})

    def test_bad_mode_counts(self):
        with pytest.raises(ValueError):
            ExperimentSpec("theorem1", n=3, N=2)

    def test_birula_equals_theorem1(self):
        b = run_experiment(ExperimentSpec("birula", n=2))
        t = run_experiment(ExperimentSpec("theorem1", n=2, A="identity", B="fourier"))
        assert (b.lhs, b.bound) == (t.lhs, t.bound)

    def test_guanlei_equals_theorem1(self):
        g = run_experiment(ExperimentSpec("guanlei", theta=0.4, phi=1.3))
        t = run_experiment(ExperimentSpec("theorem1", A="rotation", B="rotation", theta=0.4, phi=1.3))
        assert (g.lhs, g.bound) == (t.lhs, t.bound)
        assert g.slack == pytest.approx(-math.log(abs(math.sin(0.4 - 1.3))), abs=1e-9)

    def test_huang_equals_extended(self):
        spec = dict(n=1, N=2, state="correlated", rows_a="random", rows_b="random", seed=4)
        h = run_experiment(ExperimentSpec("huang", **spec))
        e = run_experiment(ExperimentSpec("theorem1_extended", **spec))
        assert (h.lhs, h.bound) == (e.lhs, e.bound)

    def test_huang_needs_single_row(self):
        with pytest.raises(ValueError):
            run_experiment(ExperimentSpec("huang", n=2, N=3, rows_a="random", rows_b="random"))

    def test_determinism(self):
        spec = ExperimentSpec("theorem3", n=2, N=3, state="correlated", A="random", B="random", seed=11)
        a, b = run_experiment(spec), run_experiment(spec)
        assert a.to_dict(timing=False) == b.to_dict(timing=False)
        assert a.inputs_digest == b.inputs_digest != ""
        assert run_experiment(replace(spec, seed=12)).inputs_digest != a.inputs_digest

    def test_matrix_dict_input(self):
        A = sp.random_symplectic(2, 3)
        rep = run_experiment(ExperimentSpec("theorem1", n=2, A=A.to_dict(), B="fourier"))
        assert rep.bound == pytest.approx(sp.shannon_bound(A, sp.fourier_form(2)), abs=1e-12)

    def test_state_dict_input(self):
        state = correlated_gaussian(1, 2)
        rep = run_experiment(ExperimentSpec("birula", state=state.to_dict()))
        assert rep.lhs == verify_theorem1(state, sp.identity(1), sp.fourier_form(1)).lhs

    def test_grid_states(self):
        rep = run_experiment(ExperimentSpec("birula", state="cat", state_param=1.5, grid_points=512))
        assert rep.path == "grid" and rep.status == "pass"


class TestSweep:
    def test_guanlei_curve(self):
        template = ExperimentSpec("guanlei", phi=0.0)
        gaps = np.linspace(0, np.pi, 22)[1:-1]
        out = sweep(template, "gap", gaps[::-1])
        assert [r["param"] for r in out] == sorted(gaps)
        for r in out:
            assert r["report"].slack == pytest.approx(-math.log(math.sin(r["param"])), abs=1e-9)
            assert r["report"].bound == pytest.approx(math.log(math.pi * math.e * math.sin(r["param"])), abs=1e-9)

    def test_squeezing_leaves_birula_sum(self):
        out = sweep(ExperimentSpec("birula"), "squeeze", np.linspace(0, 2, 9))
        lhs = [r["report"].lhs for r in out]
        assert max(lhs) - min(lhs) <= 1e-12

    def test_alpha_continuity(self):
        out = sweep(ExperimentSpec("theorem2", alpha=2.0), "alpha", [0.999, 0.9999, 1.0, 1.0001, 1.001])
        bounds = [r["report"].bound for r in out]
        assert max(bounds) - min(bounds) <= 1e-6
        assert bounds[2] == pytest.approx(LN_PI_E, abs=1e-12)

    def test_errors_recorded(self):
        out = sweep(ExperimentSpec("theorem2", alpha=2.0), "alpha", [0.3, 2.0])
        assert out[0]["report"] is None and "ValueError" in out[0]["error"]
        assert out[1]["report"].status == "pass"
        csv_text = sweep_to_csv(out, "theorem2")
        assert "error" in csv_text.splitlines()[1]

    def test_workers_same_result(self):
        template = ExperimentSpec("theorem1", n=2, state="correlated", A="random", B="random")
        seeds = list(range(12))
        serial = sweep(template, "seed", seeds)
        threaded = sweep(template, "seed", seeds, workers=4)
        assert [r["report"].to_dict(timing=False) for r in serial] == [r["report"].to_dict(timing=False) for r in threaded]

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            sweep(ExperimentSpec("birula"), "colour", [1.0])

    def test_csv_header(self):
        text = sweep_to_csv(sweep(ExperimentSpec("birula"), "squeeze", [0.0]), "birula")
        assert text.splitlines()[0] == "param,relation,n,N,lhs,bound,slack,status,path,inputs_digest,error"
