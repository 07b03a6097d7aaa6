from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly
from pydantic import ValidationError

from exotic.constants import LUNCHBOX_T_MAX
from exotic.exceptions import GeometricRegimeError, SolverError
from exotic.geometry import minkowski_inner
from exotic.groups import LunchboxParams, closed_form_t0, find_t0, verify_exotic_tangency
from exotic.groups.lunchbox import (
    RADICAND_COEFFICIENTS,
    bisect_cubic,
    count_cubic_roots,
    cubic,
    face_normals,
    factor_identity_audit,
    h_negative_on_interval,
    h_poly,
    h_second_derivative,
    orthogonality_residuals,
    solve_plane_normal,
)

T0_APPROX = 1.2020


class TestPolynomials:
    def test_cubic_brackets_root(self) -> None:
        assert cubic(1.0) == -81.0
        assert cubic(2.0) == 539.0

    def test_h_endpoints(self) -> None:
        assert h_poly(1.0) == -5184.0
        assert h_poly(2.0) == -8281.0

    def test_h_negative(self) -> None:
        assert h_negative_on_interval()

    def test_single_root(self) -> None:
        assert count_cubic_roots() == 1
        assert count_cubic_roots(1.0, 1.2) == 0

    @pytest.mark.parametrize("t", [1.1, 1.5, 1.9])
    def test_factor_identity(self, t: float) -> None:
        audit = factor_identity_audit(t)
        assert audit.residual < 1e-8
        assert audit.matching_variant == "+29u²"
        assert audit.minus_residual > audit.plus_residual

    @pytest.mark.parametrize("t", np.linspace(1.05, 1.95, 20).tolist())
    def test_factor_identity_grid(self, t: float) -> None:
        audit = factor_identity_audit(t)
        assert audit.residual < 1e-8
        assert audit.matching_variant == "+29u²"

    def test_expansion_at_random_parameters(self) -> None:
        ts = np.random.default_rng(2718).uniform(1.02, 1.98, 50)
        for t in ts[np.abs(ts - T0_APPROX) > 1e-3]:
            p = LunchboxParams.from_t(float(t))
            usq = p.u * p.u
            assert factor_identity_audit(float(t)).residual < 1e-8
            # the radicand under g expands (u² + 2)(16u² - 3)
            expanded = (usq + 2.0) * (16.0 * usq - 3.0)
            assert npoly.polyval(usq, RADICAND_COEFFICIENTS) == pytest.approx(expanded, rel=1e-12)

    def test_h_is_convex(self) -> None:
        for t in np.linspace(1.0, 2.0, 100):
            expected = -6474.0 + 5496.0 * t + 240.0 * t**2 + 1440.0 * t**3
            assert h_second_derivative(float(t)) == pytest.approx(expected, rel=1e-12)
            assert h_second_derivative(float(t)) > 0.0

    def test_unit_residual_changes_sign_once(self) -> None:
        def unit_residual(t: float) -> float:
            return solve_plane_normal(LunchboxParams.from_t(t)).unitResidual

        assert unit_residual(1.1) * unit_residual(1.3) < 0.0
        signs = np.sign([unit_residual(float(t)) for t in np.linspace(1.1, 1.3, 201)])
        assert np.count_nonzero(np.diff(signs)) == 1


class TestRoot:
    def test_bisection_bracket(self) -> None:
        bracket = bisect_cubic()
        assert bracket.upper - bracket.lower <= 1e-14
        assert bracket.lower <= bracket.root <= bracket.upper

    def test_find_t0(self) -> None:
        t0 = find_t0()
        assert t0 == pytest.approx(T0_APPROX, abs=1e-3)
        assert abs(cubic(t0)) < 1e-10

    def test_closed_form_agrees(self) -> None:
        assert closed_form_t0() == pytest.approx(find_t0(), abs=1e-12)

    def test_width_is_validated(self) -> None:
        with pytest.raises(ValidationError):
            find_t0(width=0.0)

    def test_no_sign_change(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr("exotic.groups.lunchbox.ROOT_INTERVAL", (1.0, 1.1))
        with pytest.raises(SolverError, match="no sign change") as e:
            bisect_cubic()
        assert e.value.residuals["lower"] == -81.0
        assert e.value.residuals["upper"] < 0.0


class TestLunchboxParams:
    def test_totally_geodesic(self) -> None:
        p = LunchboxParams.from_t(2.0)
        assert p.is_totally_geodesic
        assert p.u == pytest.approx(math.sqrt(1.5))

    @pytest.mark.parametrize("t", [1.0, 0.5, LUNCHBOX_T_MAX, 10.0])
    def test_outside_regime(self, t: float) -> None:
        with pytest.raises(GeometricRegimeError, match="outside geometric regime"):
            LunchboxParams.from_t(t)

    def test_normal_orthogonal_at_root(self) -> None:
        p = LunchboxParams.from_t(find_t0())
        solution = solve_plane_normal(p)
        residuals = orthogonality_residuals(p, solution.vector)
        assert max(abs(r) for r in residuals) < 1e-9
        assert abs(solution.unitResidual) < 1e-9
        assert abs(solution.tangencyResidual) < 1e-9

    def test_face_normals_are_unit(self) -> None:
        p = LunchboxParams.from_t(1.5)
        for n in face_normals(p):
            assert minkowski_inner(n, n) == pytest.approx(1.0, abs=1e-9)


class TestExoticTangency:
    def test_passes_at_root(self) -> None:
        report = verify_exotic_tangency()
        assert report.passed, report.failed_checks()
        assert report.t == report.t0_bisection
        assert report.roots_in_interval == 1
        assert report.h_endpoint_values == (-5184.0, -8281.0)
        assert report.h_at_t < 0.0

    def test_displayed_sign_is_corrected(self) -> None:
        report = verify_exotic_tangency()
        assert report.x2_displayed == -report.x[2]
        assert not report.x2_sign_consistent

    def test_fails_away_from_root(self) -> None:
        report = verify_exotic_tangency(1.5)
        assert not report.passed
        assert "unit" in report.failed_checks()
        assert report.checks["closed_form_agreement"].passed

    def test_rejects_out_of_range(self) -> None:
        with pytest.raises(ValidationError):
            verify_exotic_tangency(LUNCHBOX_T_MAX + 0.1)
