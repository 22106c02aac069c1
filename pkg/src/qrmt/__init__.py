"""Numerics for the beta = 2 Stieltjes-Wigert random matrix ensemble."""

import os as _os

# QRMT_THREADS caps BLAS/OpenMP threads; it has to be set before numpy loads
if _os.environ.get("QRMT_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["QRMT_THREADS"])

__version__ = "0.1.0"

from .errors import NumericalPrecisionError, PrecisionWarning, SamplerDiagnosticsError  # noqa: E402
from .signedlog import SignedLog  # noqa: E402
