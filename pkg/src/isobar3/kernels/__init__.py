"""Hot-loop kernels with a compiled core and a pure fallback.

The compiled extension is preferred when importable; set ISOBAR3_KERNELS to
"pure" or "fast" to force one side (parity tests and benchmarks do).
"""

import os

_forced = os.environ.get("ISOBAR3_KERNELS", "").strip().lower()

if _forced == "pure":
    from . import _pure as _impl
elif _forced == "fast":
    from . import _fast as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

BACKEND = "fast" if _impl.__name__.endswith("_fast") else "pure"

divisor_sieve = _impl.divisor_sieve
compensated_cumsum = _impl.compensated_cumsum
