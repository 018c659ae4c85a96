"""Constructions of initial data in prescribed phase-space regions.

Along an admissible ray s -> s * z_star (z_star on the Nehari manifold) the
potential value J(s z_star) rises from 0 to its manifold value at s = 1 and
strictly decreases beyond it, while the Nehari sign is positive inside and
negative outside.  Bisecting the scaling therefore pins initial data
(u0, 0) with I(u0) of either sign and E(0) = J(u0) at any feasible target.
"""

import numpy as np

from wavewell import State, potential_J, project_to_nehari
from wavewell.well import NoScalingRootError

from conftest import decayed_field


def _bisect_scaling(domain, nl, z_star, lo, hi, e_target, increasing, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = potential_J(domain, nl, mid * z_star)
        if (val < e_target) == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    return 0.5 * (lo + hi)


def ray_data_with_energy(domain, nl, rng, region, e_target, max_tries=100):
    """State (u0, 0) with sign(I(u0)) per ``region`` and E(0) = e_target.

    region "W" needs 0 < e_target below the ray's manifold value (any target
    below the certified depth bound works); region "V" accepts any target
    below it, including nonpositive ones.
    """
    for _ in range(max_tries):
        z = decayed_field(domain, rng)
        try:
            z_star = project_to_nehari(domain, nl, z)
        except (NoScalingRootError, ValueError):
            continue
        j_star = potential_J(domain, nl, z_star)
        if e_target >= j_star:
            continue
        if region == "W":
            if e_target <= 0:
                raise ValueError("W-region data needs a positive energy target")
            s = _bisect_scaling(domain, nl, z_star, 0.0, 1.0, e_target, increasing=True)
        elif region == "V":
            hi = 2.0
            while potential_J(domain, nl, hi * z_star) > e_target:
                hi *= 2.0
                if hi > 2.0 ** 40:
                    break
            else:
                s = _bisect_scaling(domain, nl, z_star, 1.0, hi, e_target,
                                    increasing=False)
                return State(s * z_star, np.zeros(domain.n_modes))
            continue
        else:
            raise ValueError(f"unknown region {region!r}")
        return State(s * z_star, np.zeros(domain.n_modes))
    raise RuntimeError(f"no admissible ray found for region {region} in {max_tries} tries")
