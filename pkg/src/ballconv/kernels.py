"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. Setting ``BALLCONV_PURE_PYTHON=1`` forces the fallback.
"""
import importlib
import os

from . import _kernels_py

_FUNCS = ("pairwise_sum", "ray_ball_exit_min", "family_arcs_2d", "family_support_2d")


def load_backend(name):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("ballconv._kernels_c")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("BALLCONV_PURE_PYTHON", "") not in ("", "0"):
        return "python", _kernels_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _kernels_py


BACKEND, _impl = _select()

pairwise_sum = _impl.pairwise_sum
ray_ball_exit_min = _impl.ray_ball_exit_min
family_arcs_2d = _impl.family_arcs_2d
family_support_2d = _impl.family_support_2d

__all__ = ["BACKEND", "load_backend", *_FUNCS]
