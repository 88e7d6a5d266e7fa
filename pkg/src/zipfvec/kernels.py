"""Selects the training kernel at import: the compiled extension when the
build produced it, otherwise the NumPy fallback. Both expose the same
functions (sg_step, cbow_step, train_epoch, sample_window_sizes).
"""

from __future__ import annotations

from . import _inner_py

try:
    from . import _inner as _active
except ImportError:
    _active = _inner_py

COMPILED = bool(getattr(_active, "COMPILED", False))
KERNEL_NAME = "cython" if COMPILED else "numpy"

sg_step = _active.sg_step
cbow_step = _active.cbow_step
train_epoch = _active.train_epoch
sample_window_sizes = _active.sample_window_sizes
sample_negatives = _active.sample_negatives


def available_kernels() -> dict[str, object]:
    """Importable kernel modules keyed by name."""
    kernels: dict[str, object] = {"numpy": _inner_py}
    if COMPILED:
        kernels["cython"] = _active
    return kernels


def get_kernel(name: str = "auto"):
    if name in ("auto", KERNEL_NAME):
        return _active
    kernels = available_kernels()
    if name not in kernels:
        raise ValueError(f"kernel {name!r} not available (have {sorted(kernels)})")
    return kernels[name]
