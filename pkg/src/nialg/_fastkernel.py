"""Optional C accelerator for the modular elimination inner loop.

Compiled lazily with cc into a per-user cache directory; any failure
(no compiler, sandboxed filesystem) silently falls back to the numpy
implementation in ``linalg``.
"""

from __future__ import annotations

import ctypes
import hashlib
import os
import subprocess
import sysconfig

_SRC = os.path.join(os.path.dirname(__file__), "_kernel.c")
_FUNC = None
_TRIED = False


def _cache_dir() -> str:
    base = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    return os.path.join(base, "nialg")


def _build() -> str | None:
    with open(_SRC, "rb") as fh:
        src = fh.read()
    tag = hashlib.sha256(src).hexdigest()[:16]
    d = _cache_dir()
    sopath = os.path.join(d, f"kernel-{tag}.so")
    if os.path.exists(sopath):
        return sopath
    os.makedirs(d, exist_ok=True)
    cc = sysconfig.get_config_var("CC") or "cc"
    cmd = cc.split() + ["-O2", "-shared", "-fPIC", "-o", sopath + ".tmp", _SRC]
    try:
        subprocess.run(cmd, check=True, capture_output=True, timeout=120)
    except Exception:
        return None
    os.replace(sopath + ".tmp", sopath)
    return sopath


def reduce_row_func():
    """ctypes handle for reduce_row, or None when unavailable."""
    global _FUNC, _TRIED
    if _TRIED:
        return _FUNC
    _TRIED = True
    if os.environ.get("NIALG_NO_CKERNEL"):
        return None
    sopath = _build()
    if sopath is None:
        return None
    try:
        lib = ctypes.CDLL(sopath)
    except OSError:
        return None
    fn = lib.reduce_row
    fn.restype = ctypes.c_int64
    fn.argtypes = [
        ctypes.c_void_p,  # scratch
        ctypes.c_int64,   # ncols
        ctypes.c_int64,   # p
        ctypes.c_void_p,  # pivot_of_pos
        ctypes.c_void_p,  # row_start
        ctypes.c_void_p,  # row_len
        ctypes.c_void_p,  # pos_pool
        ctypes.c_void_p,  # val_pool
        ctypes.c_int64,   # cursor
        ctypes.c_int64,   # elimination budget (<=0: unlimited)
        ctypes.c_int64,   # full mode: reduce past pivot-free columns
    ]
    _FUNC = fn
    return _FUNC
