"""Numerical Riemannian geometry of the 15-angle SU(4) chart.

The metric comes from the line element ``ds^2 = Tr[dU dU^dagger]`` by
central differences of the chart map.  With it the Laplace-Beltrami operator
is applied in divergence form, which lets the two heat-kernel identities

    Delta rho = -8 rho + 2 * 1        Delta L = -20 L + 4

and the proportionality between ``sqrt|g|`` and the Haar density be checked
numerically at arbitrary interior points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NumericError, ValidationError
from .su4 import ANGLE_UPPER, N_ANGLES, euler_unitary, haar_density, interior_mask, sample_haar_angles
from .su4 import reduced_sigma_of_alpha, rho_of_alpha

DEFAULT_STEP = 1e-3
BOUNDARY_FACTOR = 10
COND_LIMIT = 1e10
IDENTITY_TOL = 1e-2

ScalarField = Callable[[np.ndarray], "float | np.ndarray"]


@dataclass(frozen=True)
class MetricAtPoint:
    point: np.ndarray
    g: np.ndarray
    h: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.g)


def _interior_point(a, h: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (N_ANGLES,):
        raise ValidationError(f"expected {N_ANGLES} angles, got shape {a.shape}")
    if not (np.isfinite(h) and h > 0):
        raise ValidationError(f"step must be positive, got {h!r}")
    if not interior_mask(a, BOUNDARY_FACTOR * h):
        raise ValidationError(f"point is closer than {BOUNDARY_FACTOR}h to a range boundary")
    return a


def _stencil(points: np.ndarray, h: float) -> np.ndarray:
    """Points shifted by +h and -h along every axis, shape ``(P, 2, 15, 15)``."""
    shift = h * np.eye(N_ANGLES)
    return np.stack([points[:, None, :] + shift, points[:, None, :] - shift], axis=1)


def _metric_batch(points: np.ndarray, h: float) -> np.ndarray:
    u = euler_unitary(_stencil(points, h), validate=False)
    du = (u[:, 0] - u[:, 1]) / (2 * h)
    g = np.real(np.einsum("pimn,pjmn->pij", du, np.conj(du)))
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def metric_at(a, h: float = DEFAULT_STEP) -> MetricAtPoint:
    """Metric ``g_ij = Re Tr[d_i U d_j U^dagger]`` by central differences."""
    a = _interior_point(a, h)
    return MetricAtPoint(point=a, g=_metric_batch(a[None], h)[0], h=h)


def _sqrt_det(g: np.ndarray) -> np.ndarray:
    sign, logdet = np.linalg.slogdet(g)
    if np.any(sign <= 0):
        raise NumericError("metric determinant is not positive")
    return np.exp(0.5 * logdet)


def sqrt_det_metric(a, h: float = DEFAULT_STEP) -> float:
    """``sqrt(det g)`` from an LU factorisation with partial pivoting."""
    return float(_sqrt_det(metric_at(a, h).g))


def _gradient(f: ScalarField, b: np.ndarray, h: float, active) -> np.ndarray:
    """Central-difference gradient of ``f`` at ``b``, shape ``(15, K)``."""
    f0 = np.atleast_1d(np.asarray(f(b), dtype=float)).ravel()
    grad = np.zeros((N_ANGLES, f0.size))
    for j in active:
        e = np.zeros(N_ANGLES)
        e[j] = h
        up = np.atleast_1d(np.asarray(f(b + e), dtype=float)).ravel()
        dn = np.atleast_1d(np.asarray(f(b - e), dtype=float)).ravel()
        grad[j] = (up - dn) / (2 * h)
    return grad


def laplace_beltrami(f: ScalarField, a, h: float = DEFAULT_STEP, active: Sequence[int] | None = None):
    """Apply ``(1/sqrt g) d_i (sqrt g g^ij d_j f)`` numerically at ``a``.

    ``f`` may return a scalar or an array; arrays are handled componentwise
    and the result has the same shape.  ``active`` restricts the inner
    derivatives to a subset of angles (use it when ``f`` is known not to
    depend on the others); the metric solve always uses all 15 directions.
    """
    a = _interior_point(a, h)
    active = range(N_ANGLES) if active is None else [int(j) for j in active]
    shape = np.shape(f(a))

    centre = a[None]
    outer = _stencil(centre, h)[0].reshape(-1, N_ANGLES)  # (+h e_i)_i then (-h e_i)_i
    g_all = _metric_batch(np.concatenate([centre, outer]), h)
    cond = np.linalg.cond(g_all)
    if np.any(cond > COND_LIMIT):
        raise NumericError(f"metric is ill-conditioned (cond {cond.max():.3g})")
    root = _sqrt_det(g_all)

    flux = np.empty((2 * N_ANGLES, N_ANGLES, int(np.prod(shape, dtype=int))))
    for k, b in enumerate(outer):
        flux[k] = root[k + 1] * np.linalg.solve(g_all[k + 1], _gradient(f, b, h, active))
    idx = np.arange(N_ANGLES)
    div = (flux[idx, idx] - flux[N_ANGLES + idx, idx]).sum(axis=0) / (2 * h)
    out = div / root[0]
    return float(out[0]) if shape == () else out.reshape(shape)


def identity_fields(a) -> np.ndarray:
    """Real and imaginary parts of the 16 entries of ``rho`` followed by ``L``."""
    rho = rho_of_alpha(a, validate=False)
    sigma = reduced_sigma_of_alpha(a, validate=False)
    lin = 1.0 - np.real(np.trace(sigma @ sigma))
    return np.concatenate([rho.real.ravel(), rho.imag.ravel(), [lin]])


def identity_residuals(a, h: float = DEFAULT_STEP, active=None) -> tuple[float, float]:
    """Max entrywise residual of ``Delta rho + 8 rho - 2``, and of ``Delta L + 20 L - 4``."""
    vals = identity_fields(a)
    lap = laplace_beltrami(identity_fields, a, h, active=active)
    target = -8 * vals[:32]
    target[:16] += 2 * np.eye(4).ravel()
    rho_res = float(np.max(np.abs(lap[:32] - target)))
    lin_res = float(abs(lap[32] + 20 * vals[32] - 4))
    return rho_res, lin_res


@dataclass
class IdentityReport:
    h: float
    tol: float
    rho_residuals: list = field(default_factory=list)
    linear_residuals: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def max_rho_residual(self) -> float:
        return max(self.rho_residuals, default=float("nan"))

    @property
    def max_linear_residual(self) -> float:
        return max(self.linear_residuals, default=float("nan"))

    @property
    def passed(self) -> bool:
        return (
            not self.errors
            and bool(self.rho_residuals)
            and self.max_rho_residual <= self.tol
            and self.max_linear_residual <= self.tol
        )

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "tol": self.tol,
            "points": len(self.rho_residuals) + len(self.errors),
            "rho_residuals": self.rho_residuals,
            "linear_residuals": self.linear_residuals,
            "max_rho_residual": self.max_rho_residual,
            "max_linear_residual": self.max_linear_residual,
            "errors": self.errors,
            "passed": self.passed,
        }


def check_identities(points, h: float = DEFAULT_STEP, tol: float = IDENTITY_TOL) -> IdentityReport:
    """Evaluate both Laplacian identities at every point.

    Points that fail the interior precondition, or where the numerics break
    down, are listed in ``report.errors`` instead of raising.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) < 5:
        raise ValidationError("need at least 5 points of 15 angles each")
    report = IdentityReport(h=h, tol=tol)
    for i, a in enumerate(points):
        try:
            r, l = identity_residuals(a, h)
        except (ValidationError, NumericError) as exc:
            report.errors.append({"index": i, "kind": type(exc).__name__, "message": str(exc)})
            continue
        report.rho_residuals.append(r)
        report.linear_residuals.append(l)
    return report


def sample_interior_points(n: int, rng: np.random.Generator, h: float = DEFAULT_STEP) -> np.ndarray:
    """Haar-distributed chart points, rejecting any within ``10h`` of a boundary."""
    out = []
    while sum(len(x) for x in out) < n:
        a = sample_haar_angles(rng, max(2 * n, 16))
        out.append(a[interior_mask(a, BOUNDARY_FACTOR * h)])
    return np.concatenate(out)[:n]


def density_ratio(points, h: float = DEFAULT_STEP) -> np.ndarray:
    """``sqrt|g| / mu`` at each point; constant if the two constructions agree."""
    points = np.asarray(points, dtype=float)
    for a in points:
        _interior_point(a, h)
    return _sqrt_det(_metric_batch(points, h)) / haar_density(points)


def relative_spread(x) -> float:
    x = np.asarray(x, dtype=float)
    return float((x.max() - x.min()) / abs(x.mean()))
