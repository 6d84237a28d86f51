"""Select the kernel backend at import time.

The compiled ``_core`` extension is preferred.  Set ``WEDGESE_PURE=1`` to
force the pure-Python fallback.
"""

import os

from . import _purecore

if os.environ.get("WEDGESE_PURE", "") not in ("", "0"):
    core = _purecore
else:
    try:
        from . import _core as core
    except ImportError:  # extension not built
        core = _purecore

BACKEND = core.NAME


def available_backends():
    """Map backend name to module for every backend importable here."""
    found = {_purecore.NAME: _purecore}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        found[_core.NAME] = _core
    return found
