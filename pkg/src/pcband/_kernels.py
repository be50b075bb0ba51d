"""Backend selection for the monodromy integrator.

The compiled ``_hill_ext`` module is used when it imports; otherwise the
pure-Python twin in ``_hill_py`` takes over. Setting ``PCBAND_PURE_PYTHON=1``
forces the fallback.
"""

import os

from pcband import _hill_py

try:
    if os.environ.get("PCBAND_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend forced")
    from pcband import _hill_ext
except ImportError:
    _hill_ext = None

BACKEND = "compiled" if _hill_ext is not None else "python"


def integrate(lam, wmean, wa, wb, pmean, pa, pb, length, tol, max_step,
              xs=None, potential=None, backend=None):
    """Dispatch to a backend. A callable ``potential`` always runs in Python."""
    use = backend or BACKEND
    if use == "compiled" and _hill_ext is None:
        raise RuntimeError("compiled kernel is not available")
    if use == "compiled" and potential is None:
        return _hill_ext.integrate(lam, wmean, wa, wb, pmean, pa, pb,
                                   length, tol, max_step, xs)
    return _hill_py.integrate(lam, wmean, wa, wb, pmean, pa, pb, length, tol,
                              max_step, xs, potential)


def available_backends():
    return ("compiled", "python") if _hill_ext is not None else ("python",)
