"""Built-in 2-D potential energy surfaces and critical-point tools.

All surfaces expose vectorized ``energy``, ``gradient`` and ``hessian``
taking arrays of shape (..., N) and returning shapes (...), (..., N) and
(..., N, N).  Instances are immutable after construction and safe to
share read-only between concurrent workers.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    CollisionError,
    CriticalPointError,
    DegenerateLatticeError,
    SingularPointError,
)

SURFACE_IDS = ("example1:E", "example1:E1", "example1:E2", "muller", "lj-cell")


class Surface:
    """A smooth potential energy landscape on R^N."""

    dimension = 2
    name = "surface"

    def energy(self, points):
        raise NotImplementedError

    def gradient(self, points):
        raise NotImplementedError

    def hessian(self, points):
        raise NotImplementedError

    def excluded(self, points):
        """Predicate marking points where the surface must not be evaluated."""
        points = np.asarray(points, dtype=float)
        return np.zeros(points.shape[:-1], dtype=bool)


class RingSurface(Surface):
    """Quartic ring valley with an angular barrier term y^2 / (x^2 + y^2).

    The circular valley r = 1 carries two minimizers at (+-1, 0) and a
    saddle at (0, 1); the unit circle itself is an exact minimum energy
    path.  The quartic prefactor sets the radial stiffness at the
    critical points (8 * prefactor) without moving them, which makes the
    family a controlled probe of endpoint-spectrum assumptions:

    * prefactor 1:    endpoint eigenvalues {2, 8}, tangent one simple lowest
    * prefactor 1/4:  eigenvalue 2 with multiplicity 2
    * prefactor 1/8:  endpoint eigenvalues {1, 2}, tangent one not lowest

    The origin is a singular point of the angular term; evaluation inside
    ``singular_radius`` raises :class:`SingularPointError`.
    """

    def __init__(self, quartic_prefactor=1.0, singular_radius=1e-6):
        self.prefactor = float(quartic_prefactor)
        self.singular_radius = float(singular_radius)
        self.name = f"ring(p={self.prefactor:g})"

    def _split(self, points):
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        s = x * x + y * y
        if np.any(s < self.singular_radius**2):
            raise SingularPointError("evaluation at the singular origin of the ring surface")
        return x, y, s

    def energy(self, points):
        x, y, s = self._split(points)
        p = self.prefactor
        return p * (1.0 - s) ** 2 + y * y / s

    def gradient(self, points):
        x, y, s = self._split(points)
        p = self.prefactor
        gx = -4.0 * p * x * (1.0 - s) - 2.0 * x * y * y / s**2
        gy = -4.0 * p * y * (1.0 - s) + 2.0 * y * x * x / s**2
        return np.stack([gx, gy], axis=-1)

    def hessian(self, points):
        x, y, s = self._split(points)
        p = self.prefactor
        x2, y2 = x * x, y * y
        hxx = -4.0 * p * (1.0 - s) + 8.0 * p * x2 - 2.0 * y2 / s**2 + 8.0 * x2 * y2 / s**3
        hyy = -4.0 * p * (1.0 - s) + 8.0 * p * y2 + 2.0 * x2 / s**2 - 8.0 * x2 * y2 / s**3
        hxy = 8.0 * p * x * y - 4.0 * x * y / s**2 + 8.0 * x * y * y2 / s**3
        h = np.empty(np.shape(x) + (2, 2))
        h[..., 0, 0] = hxx
        h[..., 0, 1] = hxy
        h[..., 1, 0] = hxy
        h[..., 1, 1] = hyy
        return h

    def excluded(self, points):
        points = np.asarray(points, dtype=float)
        s = points[..., 0] ** 2 + points[..., 1] ** 2
        return s < self.singular_radius**2


# Default four-well parameterization of the Muller sum-of-Gaussians
# potential.  The sign of the last amplitude differs from the classic
# 1979 table (+15 there); it is kept as configured here and can be
# overridden through ``make_surface`` parameters.
MULLER_DEFAULTS = {
    "T": (-200.0, -100.0, -170.0, -15.0),
    "a": (-1.0, -1.0, -6.5, 0.7),
    "b": (0.0, 0.0, 11.0, 0.6),
    "c": (-10.0, -10.0, -6.5, 0.7),
    "x0": (1.0, 0.0, -0.5, -1.0),
    "y0": (0.0, 0.5, 1.5, 1.0),
}


class MullerSurface(Surface):
    """Four-term exponential (Muller-type) surface with analytic derivatives."""

    def __init__(self, **params):
        unknown = set(params) - set(MULLER_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown Muller parameters: {sorted(unknown)}")
        merged = dict(MULLER_DEFAULTS)
        merged.update({k: tuple(float(v) for v in vs) for k, vs in params.items()})
        sizes = {len(v) for v in merged.values()}
        if sizes != {4}:
            raise ValueError("Muller parameter vectors must all have length 4")
        self._p = merged
        self.T = np.array(merged["T"])
        self.a = np.array(merged["a"])
        self.b = np.array(merged["b"])
        self.c = np.array(merged["c"])
        self.x0 = np.array(merged["x0"])
        self.y0 = np.array(merged["y0"])
        self.name = "muller"

    def parameters(self):
        """The six parameter vectors as a plain dict (round-trips to config)."""
        return {k: tuple(v) for k, v in self._p.items()}

    def _terms(self, points):
        points = np.asarray(points, dtype=float)
        dx = points[..., 0, None] - self.x0
        dy = points[..., 1, None] - self.y0
        u = self.a * dx * dx + self.b * dx * dy + self.c * dy * dy
        e = self.T * np.exp(u)
        return dx, dy, e

    def energy(self, points):
        _, _, e = self._terms(points)
        return e.sum(axis=-1)

    def gradient(self, points):
        dx, dy, e = self._terms(points)
        ux = 2.0 * self.a * dx + self.b * dy
        uy = self.b * dx + 2.0 * self.c * dy
        return np.stack([(e * ux).sum(axis=-1), (e * uy).sum(axis=-1)], axis=-1)

    def hessian(self, points):
        dx, dy, e = self._terms(points)
        ux = 2.0 * self.a * dx + self.b * dy
        uy = self.b * dx + 2.0 * self.c * dy
        hxx = (e * (ux * ux + 2.0 * self.a)).sum(axis=-1)
        hxy = (e * (ux * uy + self.b)).sum(axis=-1)
        hyy = (e * (uy * uy + 2.0 * self.c)).sum(axis=-1)
        h = np.empty(np.shape(dx)[:-1] + (2, 2))
        h[..., 0, 0] = hxx
        h[..., 0, 1] = hxy
        h[..., 1, 0] = hxy
        h[..., 1, 1] = hyy
        return h


class LennardJonesCellSurface(Surface):
    """Energy per cell of a two-atom 2-D crystal with a cut-off LJ pair potential.

    One atom is pinned at the origin, the second sits at (x, y) and the
    crystal is the lattice generated by (2x, 0) and (x, y).  The energy
    per cell is the sum of the two half site-energies.  Because (x, y)
    is itself a lattice translate, both half sums run over the same set
    of separations (a*x, b*y) with a - b even, so the per-cell energy
    equals one full site-energy sum; gradients and Hessians follow by
    the chain rule through the integer scalings (a, b).

    The pair potential is 4*eps*((sigma/r)^12 - (sigma/r)^6) multiplied
    by the unique cubic in r that is 1 with zero slope at ``r_on`` and
    0 with zero slope at ``r_off`` (C^1 at both ends, identically zero
    beyond ``r_off``).
    """

    def __init__(self, epsilon0=1.0, sigma0=1.0, r_on=1.9, r_off=2.7, margin=0.5):
        if not 0.0 < r_on < r_off:
            raise ValueError("need 0 < r_on < r_off")
        self.epsilon0 = float(epsilon0)
        self.sigma0 = float(sigma0)
        self.r_on = float(r_on)
        self.r_off = float(r_off)
        self.margin = float(margin)
        self.collision_tol = 1e-8
        self.name = "lj-cell"

    def parameters(self):
        return {
            "epsilon0": self.epsilon0,
            "sigma0": self.sigma0,
            "r_on": self.r_on,
            "r_off": self.r_off,
            "margin": self.margin,
        }

    def _cutoff(self, r):
        t = np.clip((r - self.r_on) / (self.r_off - self.r_on), 0.0, 1.0)
        width = self.r_off - self.r_on
        cut = 1.0 - t * t * (3.0 - 2.0 * t)
        dcut = -6.0 * t * (1.0 - t) / width
        d2cut = (-6.0 + 12.0 * t) / width**2
        inside = r <= self.r_on
        outside = r >= self.r_off
        zero = np.zeros_like(t)
        cut = np.where(inside, 1.0, np.where(outside, 0.0, cut))
        dcut = np.where(inside | outside, zero, dcut)
        d2cut = np.where(inside | outside, zero, d2cut)
        return cut, dcut, d2cut

    def pair_potential(self, r):
        """phi(r), the cut-off pair energy, vectorized over r."""
        return self._pair_derivs(np.asarray(r, dtype=float))[0]

    def _pair_derivs(self, r):
        cut, dcut, d2cut = self._cutoff(r)
        sr6 = (self.sigma0 / r) ** 6
        sr12 = sr6 * sr6
        u = 4.0 * self.epsilon0 * (sr12 - sr6)
        du = 4.0 * self.epsilon0 * (-12.0 * sr12 + 6.0 * sr6) / r
        d2u = 4.0 * self.epsilon0 * (156.0 * sr12 - 42.0 * sr6) / r**2
        phi = u * cut
        dphi = du * cut + u * dcut
        d2phi = d2u * cut + 2.0 * du * dcut + u * d2cut
        # beyond the outer cutoff everything is exactly zero
        dead = r >= self.r_off
        phi = np.where(dead, 0.0, phi)
        dphi = np.where(dead, 0.0, dphi)
        d2phi = np.where(dead, 0.0, d2phi)
        return phi, dphi, d2phi

    def _separation_grid(self, points, extra_margin=0.0):
        """Integer scalings (a, b), a - b even, covering every interacting
        separation (a*x, b*y) for all points in the batch.

        Columns whose separation exceeds ``r_off`` for every point are
        dropped, so enlarging the enumeration radius cannot change any
        result (compact support of the pair potential).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x, y = pts[:, 0], pts[:, 1]
        if np.any(y <= 0.0):
            raise DegenerateLatticeError("lattice requires y > 0")
        if np.any(np.abs(x) <= self.collision_tol):
            raise DegenerateLatticeError("lattice generators are collinear (x ~ 0)")
        radius = self.r_off + np.max(np.hypot(x, y)) + self.margin + extra_margin
        amax = int(np.ceil(radius / np.min(np.abs(x))))
        bmax = int(np.ceil(radius / np.min(y)))
        a = np.arange(-amax, amax + 1)
        b = np.arange(-bmax, bmax + 1)
        aa, bb = np.meshgrid(a, b, indexing="ij")
        keep = ((aa - bb) % 2 == 0) & ~((aa == 0) & (bb == 0))
        aa, bb = aa[keep], bb[keep]
        r = np.hypot(aa * x[:, None], bb * y[:, None])
        if np.any(r < self.collision_tol):
            raise CollisionError("lattice sites closer than the collision threshold")
        active = (r < self.r_off).any(axis=0)
        return aa[active], bb[active], r[:, active]

    def energy(self, points, extra_margin=0.0):
        pts = np.asarray(points, dtype=float)
        _, _, r = self._separation_grid(pts, extra_margin)
        phi = self._pair_derivs(r)[0]
        site = phi.sum(axis=1)
        e = 0.5 * site + 0.5 * site
        return e.reshape(pts.shape[:-1])

    def gradient(self, points, extra_margin=0.0):
        pts = np.asarray(points, dtype=float)
        flat = np.atleast_2d(pts)
        a, b, r = self._separation_grid(flat, extra_margin)
        _, dphi, _ = self._pair_derivs(r)
        coef = dphi / r
        gx = (coef * a**2).sum(axis=1) * flat[:, 0]
        gy = (coef * b**2).sum(axis=1) * flat[:, 1]
        return np.stack([gx, gy], axis=-1).reshape(pts.shape)

    def hessian(self, points, extra_margin=0.0):
        pts = np.asarray(points, dtype=float)
        flat = np.atleast_2d(pts)
        a, b, r = self._separation_grid(flat, extra_margin)
        _, dphi, d2phi = self._pair_derivs(r)
        wx = a * flat[:, 0:1]
        wy = b * flat[:, 1:2]
        ux, uy = wx / r, wy / r
        radial = d2phi - dphi / r
        hxx = (a**2 * (dphi / r + radial * ux * ux)).sum(axis=1)
        hyy = (b**2 * (dphi / r + radial * uy * uy)).sum(axis=1)
        hxy = (a * b * radial * ux * uy).sum(axis=1)
        h = np.empty(flat.shape[:-1] + (2, 2))
        h[..., 0, 0] = hxx
        h[..., 0, 1] = hxy
        h[..., 1, 0] = hxy
        h[..., 1, 1] = hyy
        return h.reshape(pts.shape[:-1] + (2, 2))

    def excluded(self, points):
        points = np.asarray(points, dtype=float)
        return (points[..., 1] <= 0.0) | (np.abs(points[..., 0]) <= self.collision_tol)


def make_surface(surface_id, params=None):
    """Build a surface from its string id, with optional parameter overrides."""
    params = dict(params or {})
    if surface_id == "example1:E":
        return RingSurface(quartic_prefactor=1.0, **params)
    if surface_id == "example1:E1":
        return RingSurface(quartic_prefactor=0.25, **params)
    if surface_id == "example1:E2":
        return RingSurface(quartic_prefactor=0.125, **params)
    if surface_id == "muller":
        return MullerSurface(**params)
    if surface_id == "lj-cell":
        return LennardJonesCellSurface(**params)
    raise ValueError(f"unknown surface id {surface_id!r}; known: {SURFACE_IDS}")


# -- finite-difference consistency helpers -------------------------------

def fd_gradient(surface, point, step=1e-5):
    """Central finite difference of the energy."""
    point = np.asarray(point, dtype=float)
    g = np.empty_like(point)
    for i in range(point.size):
        e = np.zeros_like(point)
        e[i] = step
        g[i] = (surface.energy(point + e) - surface.energy(point - e)) / (2.0 * step)
    return g

def fd_hessian(surface, point, step=1e-4):
    """Central finite difference of the analytic gradient."""
    point = np.asarray(point, dtype=float)
    n = point.size
    h = np.empty((n, n))
    for i in range(n):
        e = np.zeros_like(point)
        e[i] = step
        h[:, i] = (surface.gradient(point + e) - surface.gradient(point - e)) / (2.0 * step)
    return 0.5 * (h + h.T)


# -- critical points ------------------------------------------------------

@dataclass
class CriticalPointReport:
    """A refined critical point with its Hessian spectrum."""

    location: np.ndarray
    grad_norm: float
    eigenvalues: np.ndarray       # ascending
    eigenvectors: np.ndarray      # orthonormal columns, matching order
    classification: str           # minimizer | index1_saddle | other
    num_negative: int

    def as_dict(self):
        return {
            "location": self.location.tolist(),
            "grad_norm": self.grad_norm,
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
            "classification": self.classification,
            "num_negative": self.num_negative,
        }


def _classify(eigenvalues):
    neg = int(np.sum(eigenvalues < 0.0))
    if np.all(eigenvalues > 0.0):
        return "minimizer", neg
    if neg == 1 and np.all(np.delete(eigenvalues, np.argmin(eigenvalues)) > 0.0):
        return "index1_saddle", neg
    return "other", neg


def _report_at(surface, x, grad_norm):
    hess = surface.hessian(x)
    w, v = np.linalg.eigh(hess)
    classification, neg = _classify(w)
    return CriticalPointReport(
        location=x.copy(),
        grad_norm=float(grad_norm),
        eigenvalues=w,
        eigenvectors=v,
        classification=classification,
        num_negative=neg,
    )


def find_critical_point(surface, guess, tol=1e-10, max_iter=100, max_halvings=60):
    """Damped Newton refinement of a root of the gradient.

    The full Newton step is halved until the gradient norm decreases;
    failure to decrease after ``max_halvings`` halvings, a singular
    Hessian, or exhausting ``max_iter`` raises CriticalPointError.
    """
    x = np.asarray(guess, dtype=float).copy()
    g = surface.gradient(x)
    gnorm = float(np.linalg.norm(g))
    for _ in range(max_iter):
        if gnorm <= tol:
            return _report_at(surface, x, gnorm)
        hess = surface.hessian(x)
        try:
            step = np.linalg.solve(hess, -g)
        except np.linalg.LinAlgError as exc:
            raise CriticalPointError(f"singular Hessian at {x.tolist()}") from exc
        if not np.all(np.isfinite(step)):
            raise CriticalPointError(f"non-finite Newton step at {x.tolist()}")
        scale = 1.0
        for _ in range(max_halvings):
            trial = x + scale * step
            try:
                gt = surface.gradient(trial)
                gtnorm = float(np.linalg.norm(gt))
            except (SingularPointError, DegenerateLatticeError, CollisionError):
                gtnorm = np.inf
            if gtnorm < gnorm:
                break
            scale *= 0.5
        else:
            raise CriticalPointError(f"Newton damping stalled at {x.tolist()}")
        x, g, gnorm = trial, gt, gtnorm
    if gnorm <= tol:
        return _report_at(surface, x, gnorm)
    raise CriticalPointError(f"no convergence after {max_iter} iterations (|grad|={gnorm:.3e})")


# -- structural assumptions -----------------------------------------------

@dataclass
class SpectrumAlignment:
    """How the path's end tangent sits in an endpoint Hessian spectrum."""

    aligned_index: int
    alignment_cos: float
    eigenvalue: float
    gap: float
    is_lowest: bool
    is_simple: bool

    def as_dict(self):
        return {
            "aligned_index": self.aligned_index,
            "alignment_cos": self.alignment_cos,
            "eigenvalue": self.eigenvalue,
            "gap": self.gap,
            "is_lowest": self.is_lowest,
            "is_simple": self.is_simple,
        }


@dataclass
class AssumptionVerdict:
    """Boolean verdicts for the two structural assumptions.

    The first assumption asks that the transition endpoints are strong
    minimizers and the in-between critical point is an index-1 saddle.
    The second asks that the eigenvalue picked out by each end tangent
    is the simple, lowest eigenvalue of the endpoint Hessian.
    """

    endpoints_are_minimizers: bool
    saddle_is_index1: bool
    assumption_a: bool
    end_a: SpectrumAlignment
    end_b: SpectrumAlignment
    assumption_b: bool

    def as_dict(self):
        return {
            "endpoints_are_minimizers": self.endpoints_are_minimizers,
            "saddle_is_index1": self.saddle_is_index1,
            "assumption_a": self.assumption_a,
            "end_a": self.end_a.as_dict(),
            "end_b": self.end_b.as_dict(),
            "assumption_b": self.assumption_b,
        }


def _align_spectrum(report, tangent, degeneracy_tol):
    t = np.asarray(tangent, dtype=float)
    t = t / np.linalg.norm(t)
    cosines = np.abs(report.eigenvectors.T @ t)
    i = int(np.argmax(cosines))
    w = report.eigenvalues
    scale = max(abs(w[i]), 1e-12)
    others = np.delete(w, i)
    gap = float(np.min(np.abs(others - w[i]))) if others.size else np.inf
    return SpectrumAlignment(
        aligned_index=i,
        alignment_cos=float(cosines[i]),
        eigenvalue=float(w[i]),
        gap=gap,
        is_lowest=bool(w[i] - w[0] <= degeneracy_tol * scale),
        is_simple=bool(gap > degeneracy_tol * scale),
    )


def verify_assumptions(surface, report_a, report_s, report_b,
                       tangent_at_a, tangent_at_b, degeneracy_tol=1e-6):
    """Check the structural assumptions at refined critical points.

    Never raises: the verdict carries booleans plus the alignment data
    (eigenvalue picked by each end tangent, its gap, the cosine).
    """
    minimizers = (report_a.classification == "minimizer"
                  and report_b.classification == "minimizer")
    saddle = report_s.classification == "index1_saddle"
    end_a = _align_spectrum(report_a, tangent_at_a, degeneracy_tol)
    end_b = _align_spectrum(report_b, tangent_at_b, degeneracy_tol)
    return AssumptionVerdict(
        endpoints_are_minimizers=minimizers,
        saddle_is_index1=saddle,
        assumption_a=minimizers and saddle,
        end_a=end_a,
        end_b=end_b,
        assumption_b=(end_a.is_lowest and end_a.is_simple
                      and end_b.is_lowest and end_b.is_simple),
    )
