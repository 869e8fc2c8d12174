"""Hot numeric kernels, compiled when available.

``spectrum_power`` is resolved at import time: the Cython extension if it
was built, otherwise the numpy fallback.  Both expose the same signature
and produce the same values to rounding.
"""

from . import _spectrum_np

try:
    from . import _spectrum_cy

    spectrum_power = _spectrum_cy.spectrum_power
    COMPILED = True
except ImportError:
    spectrum_power = _spectrum_np.spectrum_power
    COMPILED = False

spectrum_power_fallback = _spectrum_np.spectrum_power

__all__ = ["spectrum_power", "spectrum_power_fallback", "COMPILED"]
