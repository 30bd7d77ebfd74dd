"""Bistable traveling wavefronts of delayed reaction-diffusion equations.

Thin wrapper over the compiled core; see the submodules quasipoly,
stability_domain, toy_model, model_zoo, profile_solver, wave_verify, pde_sim.
"""

from ._core import (  # noqa: F401
    WaveProfile,
    __version__,
    model_zoo,
    pde_sim,
    profile_solver,
    quasipoly,
    stability_domain,
    toy_model,
    wave_verify,
)

__all__ = [
    "WaveProfile",
    "__version__",
    "model_zoo",
    "pde_sim",
    "profile_solver",
    "quasipoly",
    "stability_domain",
    "toy_model",
    "wave_verify",
]
