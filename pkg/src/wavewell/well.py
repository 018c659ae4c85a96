"""Embedding constants, the threshold radius xi0, Nehari projection and the
well depth.

The radius xi0 solves phi(xi) = sum_i A_i C_{p_i+1}^{p_i+1} xi^{p_i-1} = 1
with A_i the coefficient bounds of the a-terms and C_q certified embedding
constants |z|_q <= C_q |grad z|.  Inside the ball |grad z| < xi0 the Nehari
functional is strictly positive, which yields the certified lower bound

    d >= (p1-1)/(2(p1+1)) xi0^2

for the well depth d = inf{J(z) : I(z) = 0, grad z != 0}.  A sampled scan of
directions projected onto the Nehari manifold gives an upper estimate; the
pair (d_lower, d_upper) brackets d, and every theorem checker uses the sound
side (d_lower where "energy below d" is needed, d_upper where "above").
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rootfind
from .basis import Domain, grad_norm_sq, l2_norm_sq, lp_norm, synthesize
from .functionals import nehari_I, potential_J, term_integrals
from .nonlinearity import ABS, Nonlinearity

__all__ = [
    "DegenerateNonlinearityError",
    "NoScalingRootError",
    "AmbiguousCaseError",
    "WellReport",
    "Classification",
    "sobolev_constant",
    "rayleigh_quotient_max",
    "xi0",
    "lambda_star",
    "project_to_nehari",
    "depth_estimate",
    "classify",
    "poincare_constant",
]


class DegenerateNonlinearityError(ValueError):
    """All a-term bounds vanish: the threshold equation has no root."""


class NoScalingRootError(RuntimeError):
    """No scaling of this direction reaches the Nehari manifold."""


class AmbiguousCaseError(NoScalingRootError):
    """A case-splitting integral is numerically indistinguishable from zero."""


def sobolev_constant(domain, q: float) -> float:
    """Certified constant C_q with |z|_q <= C_q |grad z| on H_0^1(0, L).

    Sharp values for q = 2 (L/pi) and q = inf (sqrt(L)/2); for 2 < q < inf
    the interpolation product C_inf^{1-2/q} C_2^{2/q}, and for 1 <= q < 2 a
    Hoelder factor |Omega|^{1/q-1/2} times C_2.  Valid but not sharp away
    from q in {2, inf}.
    """
    if getattr(domain, "ndim", 1) != 1:
        raise NotImplementedError("embedding constants are implemented for 1D intervals only")
    L = domain.length
    c2 = L / np.pi
    if q == np.inf:
        return np.sqrt(L) / 2.0
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if q <= 2:
        return float(L ** (1.0 / q - 0.5) * c2)
    c_inf = np.sqrt(L) / 2.0
    return float(c_inf ** (1.0 - 2.0 / q) * c2 ** (2.0 / q))


def rayleigh_quotient_max(domain, q: float, n_steps: int = 400, seed: int = 0,
                          step: float = 0.2) -> float:
    """Numerically maximize |z|_q / |grad z| over the Galerkin span.

    Projected-ascent sanity oracle for :func:`sobolev_constant`: the value
    found must stay below the certified bound.  Never used in place of it.
    """
    rng = np.random.default_rng(seed)
    gamma = rng.standard_normal(domain.n_modes) / np.arange(1, domain.n_modes + 1)
    gamma /= np.sqrt(grad_norm_sq(domain, gamma))
    # the max functional has a one-node subgradient that stalls the ascent;
    # climb a smooth high-q surrogate instead while scoring the true sup
    q_grad = min(q, 128.0)
    best = 0.0
    for _ in range(n_steps):
        values = synthesize(domain, gamma)
        norm_q = lp_norm(domain, values, q)
        surrogate = lp_norm(domain, values, q_grad)
        integrand = np.abs(values) ** (q_grad - 1.0) * np.sign(values)
        g_num = surrogate ** (1.0 - q_grad) * (domain.modes @ (domain.weights * integrand))
        best = max(best, norm_q)  # gamma kept at |grad z| = 1
        # gradient of log(surrogate ratio), preconditioned by 1/lambda_j
        # (H^1 metric) so the stiff high modes do not destabilize the ascent
        ascent = (g_num / surrogate - domain.eigenvalues * gamma) / domain.eigenvalues
        gamma = gamma + step * ascent
        gamma /= np.sqrt(grad_norm_sq(domain, gamma))
    return float(best)


def _a_bounds(nl: Nonlinearity) -> list[tuple[float, float]]:
    return [(t.bound, t.exponent) for t in nl.a_terms]


def xi0(domain, nl: Nonlinearity, tol: float = 1e-12) -> float:
    """Unique positive root of sum_i A_i C_{p_i+1}^{p_i+1} xi^{p_i-1} = 1."""
    coeffs = [
        (A * sobolev_constant(domain, p + 1.0) ** (p + 1.0), p - 1.0)
        for A, p in _a_bounds(nl)
    ]
    if all(c == 0.0 for c, _ in coeffs):
        raise DegenerateNonlinearityError("all a-term coefficient bounds are zero")

    def phi(xi):
        return sum(c * xi ** e for c, e in coeffs)

    a, b = rootfind.expand_bracket(lambda xi: phi(xi) - 1.0)
    root = rootfind.bisect(lambda xi: phi(xi) - 1.0, a, b, rel_tol=1e-15)
    if abs(phi(root) - 1.0) > tol:
        raise RuntimeError(f"threshold root residual {abs(phi(root) - 1.0):.2e} > {tol}")
    return float(root)


@dataclass(frozen=True)
class _RayProfile:
    """I(lambda z) = lambda^2 (grad_sq - sum_t |lambda|^{e_t - 1} S_t(sign))."""

    grad_sq: float
    exponents: tuple[float, ...]
    s_plus: tuple[float, ...]
    s_minus: tuple[float, ...]
    sum_higher_a: float      # sum_{i>=2} int a_i |z|^{p_i+1}
    leading_a: float         # int a_1 |z|^{p_1+1} (F1) or int a_1 |z|^{p_1} z (F2)

    def h(self, lam_abs: float, positive: bool) -> float:
        s = self.s_plus if positive else self.s_minus
        return sum(lam_abs ** (e - 1.0) * si for e, si in zip(self.exponents, s))


def _ray_profile(domain, nl: Nonlinearity, z) -> _RayProfile:
    values = synthesize(domain, z)
    integrals = term_integrals(domain, nl, values)
    exps, s_plus, s_minus = [], [], []
    for k, term in enumerate(nl.terms()):
        exps.append(term.exponent)
        s_plus.append(integrals[k])
        # odd-kind integrands are even in the scaling; the abs-kind leading
        # term flips sign on the negative ray.
        s_minus.append(-integrals[k] if term.kind == ABS else integrals[k])
    n_a = len(nl.a_terms)
    return _RayProfile(
        grad_sq=grad_norm_sq(domain, z),
        exponents=tuple(exps),
        s_plus=tuple(s_plus),
        s_minus=tuple(s_minus),
        sum_higher_a=float(sum(integrals[1:n_a])),
        leading_a=float(integrals[0]),
    )


def _ray_root(profile: _RayProfile, positive: bool) -> float:
    g = lambda m: profile.h(m, positive) - profile.grad_sq
    a, b = rootfind.expand_bracket(g)
    return rootfind.bisect(g, a, b, rel_tol=1e-14)


def _case_tol(profile: _RayProfile) -> float:
    scale = max(profile.grad_sq, max(abs(s) for s in profile.s_plus), 1.0)
    return 1e-12 * scale


def lambda_star(domain, nl: Nonlinearity, z, check_tol: float = 1e-9) -> list[float]:
    """All nonzero scalings lambda with I(lambda z) = 0.

    For F1 the profile is even in lambda: two roots +/-lambda*.  For F2 the
    leading abs-power term breaks the symmetry and each ray is solved on its
    own; existence follows the case split on the higher a-term integrals.
    Integrals within tolerance of zero in a decisive position raise
    :class:`AmbiguousCaseError` rather than silently picking a case.
    """
    profile = _ray_profile(domain, nl, z)
    if profile.grad_sq == 0.0:
        raise ValueError("direction has zero gradient norm")
    tol = _case_tol(profile)
    roots: list[float] = []

    if nl.form == "F1":
        if profile.sum_higher_a > tol:
            pass  # strictly superlinear growth: root exists
        elif profile.leading_a > tol:
            pass  # leading term alone carries the growth
        elif abs(profile.leading_a) <= tol:
            raise AmbiguousCaseError(
                "case-splitting integrals are numerically zero; direction undecidable"
            )
        else:
            raise NoScalingRootError(
                "profile stays below |grad z|^2: no scaling reaches the manifold "
                f"(leading integral {profile.leading_a:.3e} < 0, higher terms vanish)"
            )
        lam = _ray_root(profile, positive=True)
        roots = [lam, -lam]
    else:
        for positive, leading in ((True, profile.leading_a), (False, -profile.leading_a)):
            if profile.sum_higher_a > tol or leading > tol:
                m = _ray_root(profile, positive)
                roots.append(m if positive else -m)
            elif abs(profile.sum_higher_a) <= tol and abs(leading) <= tol:
                raise AmbiguousCaseError(
                    "case-splitting integrals are numerically zero; direction undecidable"
                )
        if not roots:
            raise NoScalingRootError("no ray of this direction meets the manifold")

    for lam in roots:
        resid = abs(nehari_I(domain, nl, lam * np.asarray(z, dtype=float)))
        if resid > check_tol * lam * lam * profile.grad_sq:
            raise RuntimeError(
                f"scaling root check failed: |I(lambda z)| = {resid:.3e} at lambda = {lam}"
            )
    return roots


def project_to_nehari(domain, nl: Nonlinearity, z) -> np.ndarray:
    """Scale z onto the Nehari manifold along its own ray (positive scaling).

    When I(z) < 0 the returned scaling is < 1 (the manifold is crossed on the
    way out); violation signals an internal inconsistency.
    """
    z = np.asarray(z, dtype=float)
    roots = lambda_star(domain, nl, z)
    lam = min((r for r in roots if r > 0), default=None)
    if lam is None:
        raise NoScalingRootError("no positive scaling root for this direction")
    if nehari_I(domain, nl, z) < 0 and not lam < 1.0:
        raise RuntimeError(
            f"consistency violation: I(z) < 0 but scaling root {lam} >= 1"
        )
    return lam * z


@dataclass(frozen=True)
class WellReport:
    xi0: float
    d_lower: float
    d_upper: float
    n_directions: int
    seed: int
    sobolev_constants: dict[float, float]
    p1: float
    per_direction: tuple[float, ...] = ()
    n_skipped: int = 0
    refined: bool = False

    def __post_init__(self):
        if not self.d_lower > 0:
            raise ValueError(f"d_lower must be positive, got {self.d_lower}")
        if self.d_upper < self.d_lower - 1e-12 * max(1.0, self.d_lower):
            raise ValueError(
                f"inconsistent well bracket: d_upper {self.d_upper} < d_lower {self.d_lower}"
            )


@dataclass(frozen=True)
class Classification:
    region: str          # "W_interior" | "V" | "on_N" | "zero"
    I_value: float
    grad_norm: float


def d_lower_bound(nl: Nonlinearity, xi0_value: float) -> float:
    p1 = nl.p1
    return (p1 - 1.0) / (2.0 * (p1 + 1.0)) * xi0_value ** 2


def _direction_stream(domain, n_directions: int, seed: int):
    """First the lowest pure modes, then seeded decayed normals.

    Streams for larger n_directions extend the shorter ones, so the sampled
    minimum is monotone in the sample size for a fixed seed.
    """
    k = domain.n_modes
    for j in range(min(8, k)):
        e = np.zeros(k)
        e[j] = 1.0
        yield e
    rng = np.random.default_rng(seed)
    decay = 1.0 / np.arange(1, k + 1)
    for _ in range(n_directions):
        yield rng.standard_normal(k) * decay


def depth_estimate(domain, nl: Nonlinearity, n_directions: int = 128, seed: int = 0,
                   refine: bool = False, candidates=()) -> WellReport:
    """Bracket the well depth: certified lower bound and sampled upper bound.

    d_upper is the minimum of J over projections of sampled directions (plus
    the first pure modes and any user candidates) onto the Nehari manifold,
    optionally polished by derivative-free descent with re-projection.  The
    true depth is an infimum over the full manifold, so the sampled minimum
    only ever over-estimates it; d_lower is sound by construction.
    """
    xi = xi0(domain, nl)
    d_lo = d_lower_bound(nl, xi)
    minima: list[float] = []
    best_dir = None
    skipped = 0
    directions = list(candidates) + list(_direction_stream(domain, n_directions, seed))
    for z in directions:
        try:
            z_star = project_to_nehari(domain, nl, z)
        except (NoScalingRootError, ValueError):
            skipped += 1
            continue
        j_val = potential_J(domain, nl, z_star)
        minima.append(float(j_val))
        if best_dir is None or j_val <= min(minima):
            best_dir = np.asarray(z, dtype=float)
    if not minima:
        raise NoScalingRootError(
            "no sampled direction satisfies the scaling-root hypotheses"
        )
    d_up = min(minima)
    refined = False
    if refine and best_dir is not None:
        d_up = min(d_up, _refine_direction(domain, nl, best_dir))
        refined = True
    constants = {
        t.exponent + 1.0: sobolev_constant(domain, t.exponent + 1.0) for t in nl.a_terms
    }
    return WellReport(
        xi0=xi,
        d_lower=d_lo,
        d_upper=float(d_up),
        n_directions=n_directions,
        seed=seed,
        sobolev_constants=constants,
        p1=nl.p1,
        per_direction=tuple(minima),
        n_skipped=skipped,
        refined=refined,
    )


def _refine_direction(domain, nl, z0, max_iter: int = 200) -> float:
    """Nelder-Mead descent of J(project(z)) over direction coefficients."""
    from scipy.optimize import minimize

    def objective(c):
        try:
            return potential_J(domain, nl, project_to_nehari(domain, nl, c))
        except (NoScalingRootError, ValueError, RuntimeError):
            return np.inf

    res = minimize(objective, z0, method="Nelder-Mead",
                   options={"maxiter": max_iter, "xatol": 1e-8, "fatol": 1e-10})
    return float(min(objective(z0), res.fun))


def classify(domain, nl: Nonlinearity, field, i_tol: float = 1e-10,
             grad_tol: float = 1e-12, xi0_value: float | None = None) -> Classification:
    """Locate a field relative to the Nehari manifold: W interior, V, on it,
    or zero; cross-checked against the certified radius xi0."""
    field = np.asarray(field, dtype=float)
    grad_sq = grad_norm_sq(domain, field)
    grad = float(np.sqrt(grad_sq))
    if grad <= grad_tol:
        return Classification("zero", 0.0, grad)
    i_val = nehari_I(domain, nl, field)
    tol = i_tol * max(1.0, grad_sq)
    if i_val > tol:
        region = "W_interior"
    elif i_val < -tol:
        region = "V"
    else:
        region = "on_N"
    xi = xi0(domain, nl) if xi0_value is None else xi0_value
    # guard band 1e-9: just inside the certified radius the floor on I(z)
    # legitimately shrinks to zero, which is a borderline, not a bug
    if grad < xi * (1.0 - 1e-9) and region != "W_interior":
        raise RuntimeError(
            f"constants bug: |grad z| = {grad} below threshold {xi} but I(z) = {i_val}"
        )
    if region == "V" and not grad > xi:
        raise RuntimeError(
            f"constants bug: V-classified field with |grad z| = {grad} <= xi0 = {xi}"
        )
    return Classification(region, float(i_val), grad)


def poincare_constant(domain) -> float:
    """Sharp constant in |grad z|^2 >= C |z|^2, i.e. the lowest eigenvalue."""
    return float(domain.eigenvalues[0])
