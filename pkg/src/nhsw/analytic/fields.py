from __future__ import annotations

from typing import NamedTuple

import numpy as np


class SampledFields(NamedTuple):
    """Exact fields of an analytic solution at given positions and time.

    ``s`` is the vertical forcing (zero for unforced solutions); it enters the
    ``H w`` equation as ``+H s``.
    """

    H: np.ndarray
    u: np.ndarray
    w: np.ndarray
    pnh: np.ndarray
    zb: np.ndarray
    dzb: np.ndarray
    s: np.ndarray
