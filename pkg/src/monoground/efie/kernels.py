"""Kernel backend selection.

The compiled extension is used when importable.  Setting the environment
variable ``MONOGROUND_KERNELS=python`` forces the numpy fallback, and
``MONOGROUND_KERNELS=compiled`` makes a missing extension an error.
"""

import os

from . import _kernels_py

_choice = os.environ.get("MONOGROUND_KERNELS", "auto").lower()
if _choice not in ("auto", "python", "compiled"):
    raise ImportError(f"MONOGROUND_KERNELS must be auto, python or compiled, not {_choice!r}")

_impl = _kernels_py
BACKEND = "python"
if _choice != "python":
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _kernels_py

potential_integrals = _impl.potential_integrals
regular_slot_block = _impl.regular_slot_block
near_slot_block = _impl.near_slot_block

__all__ = ["BACKEND", "potential_integrals", "regular_slot_block", "near_slot_block"]
