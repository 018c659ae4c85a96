"""Dirichlet Laplacian eigenbasis on an interval with Gauss-Legendre quadrature.

Fields are represented two ways:

* spectral coefficients ``gamma`` of length K against the L2-orthonormal
  eigenmodes ``w_j(x) = sqrt(2/L) sin(j pi x / L)``;
* nodal values of length M on a fixed Gauss-Legendre grid.

All operations here are pure; a :class:`Domain` is immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Domain",
    "Rectangle",
    "eigenpair",
    "synthesize",
    "analyze",
    "integrate",
    "grad_norm_sq",
    "l2_norm_sq",
    "lp_norm",
    "inner",
]


def _gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre nodes and weights on (a, b)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * (x + 1.0) + a, 0.5 * (b - a) * w


class Domain:
    """Interval (0, L) with K sine eigenmodes sampled on M quadrature nodes.

    A single global Gauss-Legendre rule with M >= 4K nodes integrates every
    product of basis modes to machine precision, which keeps the discrete
    Gram matrix orthonormal and makes analyze/synthesize exact inverses on
    the retained modes.
    """

    ndim = 1

    def __init__(self, length: float, n_modes: int, n_quad: int | None = None):
        if length <= 0:
            raise ValueError(f"length must be positive, got {length}")
        if n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {n_modes}")
        if n_quad is None:
            n_quad = 4 * n_modes
        if n_quad < 4 * n_modes:
            raise ValueError(
                f"n_quad must be >= 4*n_modes = {4 * n_modes} (dealiasing margin), got {n_quad}"
            )
        self.length = float(length)
        self.n_modes = int(n_modes)
        self.n_quad = int(n_quad)

        self.nodes, self.weights = _gauss_legendre(0.0, self.length, self.n_quad)
        j = np.arange(1, self.n_modes + 1)
        self.eigenvalues = (j * np.pi / self.length) ** 2
        # modes[j-1, m] = w_j(x_m), L2-orthonormal
        self.modes = np.sqrt(2.0 / self.length) * np.sin(
            np.outer(j, self.nodes) * np.pi / self.length
        )
        for arr in (self.nodes, self.weights, self.eigenvalues, self.modes):
            arr.setflags(write=False)

    def __repr__(self):
        return f"Domain(length={self.length!r}, n_modes={self.n_modes}, n_quad={self.n_quad})"


class Rectangle:
    """Optional 2D extension: tensor-product sine basis on (0,Lx) x (0,Ly).

    Exposes the same arrays as :class:`Domain` (eigenvalues, modes, nodes,
    weights), so spectral/nodal conversions, norms and time integration work
    unchanged.  Modes are ordered by increasing eigenvalue.  ``nodes`` has
    shape (M, 2).
    """

    ndim = 2

    def __init__(self, lengths, n_modes, n_quad=None):
        lx, ly = (float(v) for v in lengths)
        kx, ky = (int(v) for v in n_modes)
        if lx <= 0 or ly <= 0:
            raise ValueError(f"lengths must be positive, got {lengths}")
        if kx < 1 or ky < 1:
            raise ValueError(f"n_modes must be >= 1 per axis, got {n_modes}")
        if n_quad is None:
            n_quad = (4 * kx, 4 * ky)
        mx, my = (int(v) for v in n_quad)
        if mx < 4 * kx or my < 4 * ky:
            raise ValueError(f"n_quad must be >= 4*n_modes per axis, got {n_quad}")
        self.lengths = (lx, ly)
        self.length = lx  # x-extent, for code paths that only need a scale
        self.n_modes = kx * ky
        self.n_quad = mx * my

        nx, wx = _gauss_legendre(0.0, lx, mx)
        ny, wy = _gauss_legendre(0.0, ly, my)
        xg, yg = np.meshgrid(nx, ny, indexing="ij")
        self.nodes = np.column_stack([xg.ravel(), yg.ravel()])
        self.weights = np.outer(wx, wy).ravel()

        jx = np.arange(1, kx + 1)
        jy = np.arange(1, ky + 1)
        lam = (jx[:, None] * np.pi / lx) ** 2 + (jy[None, :] * np.pi / ly) ** 2
        order = np.argsort(lam.ravel(), kind="stable")
        self.mode_index = [(int(i // ky) + 1, int(i % ky) + 1) for i in order]
        self.eigenvalues = lam.ravel()[order]

        sx = np.sqrt(2.0 / lx) * np.sin(np.outer(jx, nx) * np.pi / lx)  # (kx, mx)
        sy = np.sqrt(2.0 / ly) * np.sin(np.outer(jy, ny) * np.pi / ly)  # (ky, my)
        modes = np.einsum("im,jn->ijmn", sx, sy).reshape(kx * ky, mx * my)
        self.modes = modes[order]
        for arr in (self.nodes, self.weights, self.eigenvalues, self.modes):
            arr.setflags(write=False)

    def __repr__(self):
        return f"Rectangle(lengths={self.lengths!r}, n_modes_total={self.n_modes})"


def _check_field(domain, field) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape != (domain.n_modes,):
        raise ValueError(
            f"spectral field has shape {field.shape}, expected ({domain.n_modes},)"
        )
    if not np.all(np.isfinite(field)):
        raise ValueError("spectral field contains non-finite entries")
    return field


def _check_grid(domain, values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (domain.n_quad,):
        raise ValueError(
            f"grid function has shape {values.shape}, expected ({domain.n_quad},)"
        )
    return values


def eigenpair(domain, j: int) -> tuple[float, np.ndarray]:
    """Eigenvalue and nodal values of the j-th (1-based) basis mode."""
    if not 1 <= j <= domain.n_modes:
        raise ValueError(f"mode index {j} out of range 1..{domain.n_modes}")
    return float(domain.eigenvalues[j - 1]), domain.modes[j - 1].copy()


def synthesize(domain, field) -> np.ndarray:
    """Evaluate sum_j gamma_j w_j at the quadrature nodes."""
    return _check_field(domain, field) @ domain.modes


def analyze(domain, values) -> np.ndarray:
    """Project nodal values onto the basis: gamma_j = quadrature(g * w_j)."""
    return domain.modes @ (domain.weights * _check_grid(domain, values))


def integrate(domain, values) -> float:
    """Quadrature of nodal values over the domain."""
    return float(domain.weights @ _check_grid(domain, values))


def grad_norm_sq(domain, field) -> float:
    """|grad u|_2^2 = sum_j lambda_j gamma_j^2, exact in the basis."""
    field = _check_field(domain, field)
    return float(domain.eigenvalues @ (field * field))


def l2_norm_sq(domain, field) -> float:
    """|u|_2^2 = sum_j gamma_j^2 (Parseval)."""
    field = _check_field(domain, field)
    return float(field @ field)


def inner(domain, f1, f2) -> float:
    """L2 inner product of two spectral fields."""
    return float(_check_field(domain, f1) @ _check_field(domain, f2))


def lp_norm(domain, values, p: float) -> float:
    """L^p norm of a grid function; p = inf gives the nodal max-abs."""
    values = _check_grid(domain, values)
    if p == np.inf:
        return float(np.abs(values).max())
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return float(integrate(domain, np.abs(values) ** p) ** (1.0 / p))
