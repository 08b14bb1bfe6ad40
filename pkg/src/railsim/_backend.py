"""Selects the scan-kernel implementation at import time.

The compiled extension is used when it has been built, otherwise the
pure-Python fallback.  ``RAILSIM_KERNELS=py`` forces the fallback and
``RAILSIM_KERNELS=c`` requires the extension (import error if absent).
Both implementations produce identical results, so the choice never
affects simulation output, only speed.
"""

import os

_forced = os.environ.get("RAILSIM_KERNELS", "").strip().lower()

if _forced in ("py", "python", "pure"):
    from . import _kernels_py as _impl
elif _forced in ("c", "ext", "compiled"):
    from . import _kernels as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

sticky_scan = _impl.sticky_scan
ar1_scan = _impl.ar1_scan


def backend_name() -> str:
    return "compiled" if _impl.__name__.endswith("._kernels") else "python"
