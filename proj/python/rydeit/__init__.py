"""Rydberg-EIT cross-phase modulation simulator (Python front end)."""

import json as _json

from ._core import (  # noqa: F401
    BlockadeParams,
    ConfigError,
    DegenerateParameters,
    EITParams,
    Error,
    InsufficientStatistics,
    MediumGeometry,
    NoEitFeature,
    NonConvergence,
    NumericalError,
    UsageError,
    __version__,
    angular_from_mhz,
    apply_medium,
    blockade_radius,
    c6_from_atomic_units,
    chi,
    chi0,
    chi_blockaded,
    command_names,
    controlled_phase,
    fit_transmission,
    fringe_power,
    hard_sphere_controlled_phase,
    integrated_phase,
    mhz_from_angular,
    od_and_phase,
    retrieval_efficiency,
    spectrum,
    stokes,
    transmission_fwhm,
    vdw_shift,
)
from ._core import default_config_json as _default_config_json
from ._core import run_command as _run_command


def default_config():
    """The fully resolved default run configuration as a dict."""
    return _json.loads(_default_config_json())


def run(command, config=None, input_csv=""):
    """Run a CLI subcommand in-process.

    Returns ``(summary, files)`` where ``summary`` is the parsed JSON summary
    and ``files`` maps output file names to their CSV text.
    """
    text = _json.dumps(config or {})
    summary, files = _run_command(command, text, input_csv)
    return _json.loads(summary), dict(files)
