"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback takes over. :func:`use_backend` switches explicitly (benchmarks and
the cross-backend tests rely on it).
"""
import logging

from viddial.numerics import _pykernels

logger = logging.getLogger(__name__)

try:
    from viddial.numerics import _ckernels
except ImportError:  # pragma: no cover - depends on build
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels
BACKEND = "compiled" if _ckernels is not None else "python"


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {available_backends()}") from None


def use_backend(name):
    """Make ``name`` the active backend and return the previous name."""
    global _active, BACKEND
    previous = BACKEND
    _active = get_backend(name)
    BACKEND = name
    logger.debug("kernel backend set to %s", name)
    return previous


def lstm_forward(pre, w_h, h0, c0):
    return _active.lstm_forward(pre, w_h, h0, c0)


def lstm_backward(d_hs, w_h, c0, cs, gates):
    return _active.lstm_backward(d_hs, w_h, c0, cs, gates)


def lcs_length(a, b):
    return _active.lcs_length(a, b)
