"""Hot-kernel backend selection.

Prefers the compiled Cython core; falls back to the pure-numpy
implementation when the extension is missing or when the environment
variable ``PFOCO_PURE_PYTHON`` is set (any non-empty value).  ``BACKEND``
reports which one is active.
"""

import os

if os.environ.get("PFOCO_PURE_PYTHON"):
    from ._fallback import box_lmo, l1_ball_lmo, simplex_lmo, top_singular_pair

    BACKEND = "python"
else:
    try:
        from ._core import box_lmo, l1_ball_lmo, simplex_lmo, top_singular_pair

        BACKEND = "cython"
    except ImportError:
        from ._fallback import box_lmo, l1_ball_lmo, simplex_lmo, top_singular_pair

        BACKEND = "python"

__all__ = ["BACKEND", "box_lmo", "l1_ball_lmo", "simplex_lmo", "top_singular_pair"]
