"""Python access to the conic_spectra library."""

import json

from ._core import (
    ConicError,
    __version__,
    canonical_test,
    lattice_spectra,
    riemann_matrix,
    universal_c2,
    version_hash,
)
from ._core import run_job as _run_job


def run_job(config, **options):
    """Run a job given as a dict or JSON text; returns the report as a dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_run_job(text, **options))


__all__ = [
    "ConicError",
    "__version__",
    "canonical_test",
    "lattice_spectra",
    "riemann_matrix",
    "run_job",
    "universal_c2",
    "version_hash",
]
