"""Pick the SMO kernel: compiled extension if importable, else NumPy.

Set REVEX_PURE_PYTHON=1 to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("REVEX_PURE_PYTHON", "") not in ("", "0"):
    from revex._smo_py import smo_run
else:
    try:
        from revex._smo import smo_run
        BACKEND = "cython"
    except ImportError:  # extension not built
        from revex._smo_py import smo_run

__all__ = ["BACKEND", "smo_run"]
