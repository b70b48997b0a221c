"""Backend selection for the hot sampling kernels.

At import time the compiled extension is preferred; the pure-numpy
implementation is the fallback. MASERTUR_BACKEND=python|compiled|auto
overrides the choice (compiled raises if the extension is missing).
Within one installed backend all kernel output is bit-reproducible.
"""

from __future__ import annotations

import os

_choice = os.environ.get("MASERTUR_BACKEND", "auto").strip().lower()
if _choice not in {"auto", "compiled", "python"}:
    raise ImportError(
        f"MASERTUR_BACKEND must be 'auto', 'compiled' or 'python', got {_choice!r}"
    )

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = None
if _impl is None:
    from . import _kernels_py as _impl

    BACKEND = "python"

uniform_streams = _impl.uniform_streams
batch_uncertainty = _impl.batch_uncertainty

# Order in which uniform streams map to engine parameters everywhere.
PARAM_ORDER = ("gamma_u", "gamma_l", "n_u", "n_l", "epsilon", "delta")


def available_backends() -> tuple[str, ...]:
    """Names of importable backends (for diagnostics and the benchmark)."""
    names = ["python"]
    try:
        from . import _kernels_cy  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return tuple(names)
