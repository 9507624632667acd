"""Backend selection: compiled Cython kernels when available, numpy fallback.

Set ``AHYPER_PURE=1`` in the environment to force the pure-Python backend.
"""

from __future__ import annotations

import os

from . import _pykernels

FLOW_OK = _pykernels.FLOW_OK
FLOW_STALL = _pykernels.FLOW_STALL
FLOW_MAXSTEPS = _pykernels.FLOW_MAXSTEPS
FLOW_STEPFAIL = _pykernels.FLOW_STEPFAIL

if os.environ.get("AHYPER_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels

eval_h = _impl.eval_h
eval_h_theta = _impl.eval_h_theta
eval_h_theta_hess = _impl.eval_h_theta_hess
flow_descent = _impl.flow_descent
# batch evaluation is numpy-vectorized either way
eval_h_batch = _pykernels.eval_h_batch


def backend_name():
    return _impl.BACKEND


def backends():
    """(available, active) backend names, for provenance records."""
    avail = ["python"]
    try:
        from . import _ckernels  # noqa: F401

        avail.append("cython")
    except ImportError:
        pass
    return avail, backend_name()
