"""Interior transmission eigenvalues, Herglotz incidents and near-cloaking sweeps."""

import json

from ._core import ConfigError, ite_det, sph_j, sph_y
from . import _core

__all__ = [
    "ConfigError",
    "farfield",
    "find_eigenvalues",
    "ite_det",
    "mode_scattering_coeff",
    "sph_j",
    "sph_y",
    "sweep",
]


def find_eigenvalues(R0, R1, n, l, pol="TE", wmin=0.5, wmax=15.0, step=1e-2):
    """Interior transmission eigenvalues of the annulus in [wmin, wmax]."""
    return json.loads(_core._eigenvalues(R0, R1, n, l, pol, wmin, wmax, step))


def mode_scattering_coeff(medium, omega, l, pol="TE"):
    """Scattering multiplier S_l of a layered medium given as a dict."""
    return _core._mode_scattering_coeff(json.dumps(medium), omega, l, pol)


def farfield(scenario=None):
    """Far-field norm of the field scattered by a scenario dict."""
    return json.loads(_core._farfield(json.dumps(scenario or {})))


def sweep(kind, config=None, threads=0):
    """Run "eps-sweep", "tau-sweep" or "core-sweep" and return the summary."""
    return json.loads(_core._sweep(kind, json.dumps(config or {}), threads))
