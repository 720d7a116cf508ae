import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvform import tensor_algebra as ta
from curvform.catalog import build_met1
from curvform.classify import (DEFAULT_TOLS, PreconditionError, Tolerances, classify_curvature_form,
                               constant_curvature_relations, contract_first_last, einstein_grt_constant_coefficient,
                               einstein_level, fit_linear_combination, grt_basis, grt_contraction_coefficients,
                               quasi_constant_coefficients, quasi_constant_curvature, quasi_einstein,
                               reduce_grt_by_ein2, rt_basis, rt_contraction_coefficients, rt_to_grt_coefficients,
                               rt_to_grt_coefficients_as_printed)
from curvform.curvature import curvature_package, package_from_tensors

from conftest import sample
from test_curvature import random_chart

CHAIN = ["constant_curvature", "conformally_flat", "roter", "generalized_roter"]


def grt_residual(pkg, L):
    gw = pkg.R - sum(c * b for c, b in zip(L, grt_basis(pkg)))
    return ta.norm(gw) / ta.norm(pkg.R)


class TestFit:
    def test_exact_member(self):
        rng = np.random.default_rng(0)
        basis = list(rng.normal(size=(3, 4, 4)))
        fit = fit_linear_combination(basis[0], basis)
        np.testing.assert_allclose(fit.coefficients, [1, 0, 0], atol=1e-12)
        assert fit.relative_residual < 1e-14 and fit.status == "determinate" and fit.is_member()

    def test_orthogonal_target(self):
        rng = np.random.default_rng(1)
        basis = list(rng.normal(size=(2, 10)))
        t = rng.normal(size=10)
        q, _ = np.linalg.qr(np.column_stack(basis + [t]))
        fit = fit_linear_combination(q[:, 2], basis)
        assert abs(fit.relative_residual - 1) < 1e-12 and fit.verdict() == "non-member"

    def test_degenerate_kernel(self):
        b = np.arange(6.0)
        fit = fit_linear_combination(2 * b, [b, 2 * b])
        assert fit.status == "degenerate" and fit.kernel_basis.shape == (1, 2)
        np.testing.assert_allclose(np.abs(fit.kernel_basis[0]), np.array([2, 1]) / np.sqrt(5), atol=1e-12)
        base, spread = fit.functional_range([1, 2])
        assert base == pytest.approx(2.0) and spread < 1e-12

    def test_zero_basis(self):
        assert fit_linear_combination(np.ones(3), [np.zeros(3)]).status == "indeterminate"

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            fit_linear_combination(np.ones(3), [])
        with pytest.raises(ValueError):
            fit_linear_combination(np.ones(3), [np.ones(3)], accept_tol=1e-3, reject_tol=1e-4)
        with pytest.raises(ta.TensorShapeError):
            fit_linear_combination(np.ones(3), [np.ones(4)])
        with pytest.raises(ValueError):
            Tolerances(accept=1e-2, reject=1e-3)

    def test_tolerance_band(self):
        t = Tolerances()
        assert (t.verdict(1e-9), t.verdict(1e-6), t.verdict(1e-2)) == ("member", "indeterminate", "non-member")

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_reordering_invariance(self, seed):
        rng = np.random.default_rng(seed)
        basis = list(rng.normal(size=(4, 12)))
        basis.append(basis[0] + basis[1])  # force a kernel
        target = rng.normal(size=12)
        perm = rng.permutation(5)
        a = fit_linear_combination(target, basis)
        b = fit_linear_combination(target, [basis[i] for i in perm])
        np.testing.assert_allclose(a.coefficients[perm], b.coefficients, atol=1e-10)

    def test_met2_not_grt(self, met2_pkg):
        fit = fit_linear_combination(met2_pkg.R, grt_basis(met2_pkg))
        assert fit.relative_residual > 1e-2


class TestCurvatureForm:
    @pytest.mark.parametrize("case,label,proper", [("iii", "roter", True), ("ii", "generalized_roter", False),
                                                   ("i", "not_grt", None), ("vi", "flat", None)])
    def test_cases(self, case_pkgs, case, label, proper):
        for pkg in case_pkgs[case]:
            form = classify_curvature_form(pkg)
            assert (form.label, form.proper) == (label, proper)

    def test_case_ii_is_not_roter(self, case_pkgs):
        for pkg in case_pkgs["ii"]:
            assert classify_curvature_form(pkg).fits["roter"].relative_residual > DEFAULT_TOLS.reject

    def test_display(self, case_pkgs):
        assert classify_curvature_form(case_pkgs["iii"][0]).display == "proper Roter type"

    def test_block_is_constant_curvature(self, block_pkg):
        assert classify_curvature_form(block_pkg).label == "constant_curvature"

    def test_hierarchy_monotone(self, case_pkgs, block_pkg):
        pkgs = [block_pkg] + [p for ps in case_pkgs.values() for p in ps]
        for pkg in pkgs:
            form = classify_curvature_form(pkg)
            if form.label in CHAIN:
                for later in CHAIN[CHAIN.index(form.label):]:
                    assert form.fits[later].is_member(), (form.label, later)

    def test_conformally_flat_double_check(self):
        chart = build_met1("exp(x1)", "1")
        for x in sample("met1", 4, 3, 5):
            pkg = curvature_package(chart, x)
            form = classify_curvature_form(pkg)
            assert form.label == "conformally_flat" and form.conformal_agree and form.weyl_ratio < 1e-8
            n, k = pkg.n, pkg.kappa
            fit = form.fits["conformally_flat"]
            assert fit.functional_range([1, 0])[0] == pytest.approx(-k / (2 * (n - 1) * (n - 2)), rel=1e-9)
            assert fit.functional_range([0, 1])[0] == pytest.approx(1 / (n - 2), rel=1e-9)

    def test_conformal_agreement_everywhere(self, case_pkgs, met2_pkg):
        for pkg in [met2_pkg] + [p for ps in case_pkgs.values() for p in ps]:
            assert classify_curvature_form(pkg).conformal_agree


class TestEinstein:
    @pytest.mark.parametrize("case,level", [("i", 4), ("ii", 3), ("iii", 2), ("vi", "ricci_flat")])
    def test_case_levels(self, case_pkgs, case, level):
        for pkg in case_pkgs[case]:
            assert einstein_level(pkg).level == level

    def test_met2(self, met2_pkg):
        v = einstein_level(met2_pkg)
        assert v.level == 1 and v.display == "Einstein"
        np.testing.assert_allclose(v.relation, [-0.5, 1.0], atol=1e-12)
        assert met2_pkg.kappa / met2_pkg.n == pytest.approx(0.5)

    def test_relation_annihilates(self, case_pkgs):
        for case in ("ii", "iii"):
            pkg = case_pkgs[case][0]
            v = einstein_level(pkg)
            combo = sum(a * P for a, P in zip(v.relation, pkg.ricci_powers))
            assert ta.norm(combo) < 1e-8 * ta.norm(pkg.ricci_powers[v.level])

    def test_monotone(self, case_pkgs):
        tol = DEFAULT_TOLS
        for pkgs in case_pkgs.values():
            for pkg in pkgs:
                v = einstein_level(pkg)
                if isinstance(v.level, int):
                    fam = pkg.ricci_powers
                    for k in range(v.level + 1, 5):
                        assert fit_linear_combination(fam[k], fam[:k]).is_member(tol)

    def test_indefinite_non_diagonalizable(self):
        # Ricci operator with a 2x2 Jordan block in Lorentzian signature: never diagonalized
        g = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        S = g @ np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]])
        pkg = package_from_tensors(g, ta.kn_product(g, g))
        pkg = type(pkg)(**{**pkg.__dict__, "S": S, "S2": ta.ricci_power(S, g, 2),
                           "S3": ta.ricci_power(S, g, 3), "S4": ta.ricci_power(S, g, 4)})
        assert einstein_level(pkg).level == 2


class TestQuasi:
    def test_einstein_degenerate(self, met2_pkg):
        qe = quasi_einstein(met2_pkg)
        assert qe.degenerate and qe.beta == 0.0 and qe.alpha == pytest.approx(0.5)

    def test_constructed(self):
        g = np.eye(3)
        pkg = package_from_tensors(g, ta.kn_product(g, g))
        e1 = np.array([1.0, 0, 0])
        S = g + np.outer(e1, e1)
        pkg = type(pkg)(**{**pkg.__dict__, "S": S})
        qe = quasi_einstein(pkg)
        assert qe.alpha == pytest.approx(1) and qe.beta == pytest.approx(1)
        np.testing.assert_allclose(np.abs(qe.eta), e1, atol=1e-12)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_recovery(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 6))
        q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        g = q @ np.diag(rng.choice([-1.0, 1.0], n) * rng.uniform(0.5, 2, n)) @ q.T
        alpha, beta, eta = rng.uniform(-2, 2), rng.uniform(0.5, 2) * rng.choice([-1, 1]), rng.normal(size=n)
        S = alpha * g + beta * np.outer(eta, eta)
        pkg = package_from_tensors(g, ta.kn_product(g, g))
        pkg = type(pkg)(**{**pkg.__dict__, "S": S})
        qe = quasi_einstein(pkg)
        assert qe is not None and not qe.degenerate
        assert qe.alpha == pytest.approx(alpha, rel=1e-8, abs=1e-8)
        np.testing.assert_allclose(qe.beta * np.outer(qe.eta, qe.eta), beta * np.outer(eta, eta),
                                   atol=1e-8 * ta.norm(S))

    def test_generic_not_quasi_einstein(self, case_pkgs):
        assert quasi_einstein(case_pkgs["i"][0]) is None

    def test_constant_curvature_branch(self, block_pkg):
        qcc = quasi_constant_curvature(block_pkg, eta=np.array([1.0, 0, 0]))
        direct = fit_linear_combination(block_pkg.R, [block_pkg.G]).coefficients[0]
        assert qcc.residual < 1e-12 and abs(qcc.beta_prime) < 1e-12
        assert qcc.alpha_prime == pytest.approx(direct, rel=1e-12)

    def test_theorem_quasi_constant_on_conformally_flat_instance(self):
        # f = exp(x1), h = 1: GRT, quasi-Einstein with eta along dx1
        chart = build_met1("exp(x1)", "1")
        for x in sample("met1", 4, 21, 5):
            pkg = curvature_package(chart, x)
            qe = quasi_einstein(pkg)
            assert qe is not None and not qe.degenerate
            qcc = quasi_constant_curvature(pkg)
            assert qcc.residual < DEFAULT_TOLS.accept
            L = classify_curvature_form(pkg).fits["generalized_roter"].coefficients
            ap, bp = quasi_constant_coefficients(L, qe.alpha, qe.beta, qe.eta @ pkg.g_inv @ qe.eta)
            assert ap == pytest.approx(qcc.alpha_prime, rel=1e-6)
            assert bp == pytest.approx(qcc.beta_prime, rel=1e-6)


class TestRoterCoefficients:
    def test_collapse_exact(self):
        rng = np.random.default_rng(2)
        for N1, N2, N3, k in rng.normal(size=(10, 4)):
            assert rt_to_grt_coefficients(N1, N2, N3, k, 5, 0.0, 0.0, 0.0) == (N1, N2, N3)

    def test_printed_spot_check(self):
        assert rt_to_grt_coefficients_as_printed(1, 1, 1, 0, 5, 0, 0, 1) == (-16, -11, -1.25)

    def test_derived_spot_check(self):
        # a = 3 - 1 = 2, b = 8
        assert rt_to_grt_coefficients(1, 1, 1, 0, 5, 0, 0, 1) == (-15, -7, 0)

    def test_requires_proper_roter(self):
        with pytest.raises(ValueError):
            rt_to_grt_coefficients(1, 1, 0, 1, 5, 1, 1, 1)

    def test_family_reproduces_R(self, case_pkgs):
        rng = np.random.default_rng(3)
        for pkg in case_pkgs["iii"]:
            N = fit_linear_combination(pkg.R, rt_basis(pkg)).coefficients
            for L456 in rng.normal(size=(10, 3)):
                L = rt_to_grt_coefficients(*N, pkg.kappa, pkg.n, *L456) + tuple(L456)
                assert grt_residual(pkg, L) < 1e-8

    def test_printed_formulas_do_not_reproduce_R(self, case_pkgs):
        pkg = case_pkgs["iii"][0]
        N = fit_linear_combination(pkg.R, rt_basis(pkg)).coefficients
        L = rt_to_grt_coefficients_as_printed(*N, pkg.kappa, pkg.n, 0.3, -0.2, 0.5) + (0.3, -0.2, 0.5)
        assert grt_residual(pkg, L) > 1e-2

    def test_ein2_reduction(self, case_pkgs):
        # GRT + Ein(2): substituting S^2 = p g + q S gives a Roter form of R
        for pkg in case_pkgs["iii"]:
            a0, a1, _ = einstein_level(pkg).relation
            L = fit_linear_combination(pkg.R, grt_basis(pkg)).coefficients
            N = reduce_grt_by_ein2(L, -a0, -a1)
            rt = pkg.R - sum(c * b for c, b in zip(N, rt_basis(pkg)))
            assert ta.norm(rt) < DEFAULT_TOLS.accept * ta.norm(pkg.R)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200)
def test_contraction_identities(seed):
    rng = np.random.default_rng(seed)
    chart = random_chart(rng, 4)
    pkg = curvature_package(chart, rng.uniform(0, 1, 4))
    N, L = rng.normal(size=3), rng.normal(size=6)
    fam = pkg.ricci_powers
    rt = sum(c * b for c, b in zip(N, rt_basis(pkg)))
    got = contract_first_last(rt, pkg.g_inv)
    want = sum(c * P for c, P in zip(rt_contraction_coefficients(N, pkg.kappa, pkg.n), fam))
    assert ta.norm(got - want) <= 1e-9 * max(ta.norm(want), 1.0)
    grt = sum(c * b for c, b in zip(L, grt_basis(pkg)))
    got = contract_first_last(grt, pkg.g_inv)
    want = sum(c * P for c, P in zip(grt_contraction_coefficients(L, pkg.kappa, pkg.kappa2, pkg.n), fam))
    assert ta.norm(got - want) <= 1e-9 * max(ta.norm(want), 1.0)


class TestConstantCurvature:
    def test_block_relations(self, block_pkg):
        assert constant_curvature_relations(block_pkg) == (True, True)

    def test_synthetic_relations(self):
        g = np.diag([1.0, 2.0, 0.5])
        assert constant_curvature_relations(package_from_tensors(g, 0.3 * ta.kn_product(g, g))) == (True, True)

    def test_rejects_non_constant(self, case_pkgs):
        with pytest.raises(PreconditionError):
            constant_curvature_relations(case_pkgs["iii"][0])
        g = np.eye(3)
        R = 0.3 * ta.kn_product(g, g) + 0.1 * ta.kn_product(g, np.diag([1.0, 0, 0]))
        with pytest.raises(PreconditionError):
            constant_curvature_relations(package_from_tensors(g, R))

    def test_einstein_grt_coefficient(self, block_pkg):
        direct = fit_linear_combination(block_pkg.R, [block_pkg.G]).coefficients[0]
        assert abs(einstein_grt_constant_coefficient(block_pkg) - direct) < 1e-9

    def test_einstein_grt_flat_and_synthetic(self):
        g = np.eye(4)
        assert einstein_grt_constant_coefficient(package_from_tensors(g, np.zeros((4,) * 4))) == 0.0
        pkg = package_from_tensors(g, 0.7 * 0.5 * ta.kn_product(g, g))
        assert einstein_grt_constant_coefficient(pkg) == pytest.approx(0.7, rel=1e-12)

    def test_einstein_required(self, case_pkgs):
        with pytest.raises(PreconditionError):
            einstein_grt_constant_coefficient(case_pkgs["iii"][0])

    def test_einstein_grt_implies_constant(self, case_pkgs, block_pkg, met2_pkg):
        # Einstein + GRT must be of constant curvature
        for pkg in [block_pkg, met2_pkg] + [p for ps in case_pkgs.values() for p in ps]:
            form = classify_curvature_form(pkg)
            if einstein_level(pkg).level == 1 and form.fits["generalized_roter"].is_member():
                assert form.fits["constant_curvature"].is_member()
