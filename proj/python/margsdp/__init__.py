"""Python front end for the margsdp solver.

Configurations are plain keyword arguments with the same names as the
command-line flags (``model``, ``lattice``, ``cluster``, ``h``, ``U``,
``solver``, ``iters``, ...). Results come back as the dict written to
``result.json``.
"""

import json

from ._core import (
    MargsdpError,
    __version__,
    free_fermion_energy,
    pair_quadratic_inverse,
    psd_project,
)
from . import _core

__all__ = [
    "MargsdpError",
    "__version__",
    "config",
    "free_fermion_energy",
    "oracle",
    "pair_quadratic_inverse",
    "psd_project",
    "run",
]

_KEYS = frozenset(json.loads(_core.config_json("{}")))


def _encode(options):
    unknown = sorted(set(options) - _KEYS)
    if unknown:
        raise TypeError(f"unknown option(s): {', '.join(unknown)}")
    return json.dumps(options)


def config(**options):
    """Full configuration with defaults filled in."""
    return json.loads(_core.config_json(_encode(options)))


def run(**options):
    """Solve one configuration. Writes convergence.csv and result.json into
    ``output_dir`` and returns the result record."""
    return json.loads(_core.run_json(_encode(options)))


def oracle(**options):
    """Exact ground energy per site of the configured model."""
    return json.loads(_core.oracle_json(_encode(options)))
