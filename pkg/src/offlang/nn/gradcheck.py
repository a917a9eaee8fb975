"""Finite-difference gradient verification.

Central differences with step 1e-5 on float64 parameters, compared against
analytic gradients coordinate by coordinate. The error measure is relative
where gradients are appreciable and absolute near zero, so it neither
drowns in noise nor inflates vanishing entries.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

FD_STEP = 1e-5
# below this magnitude the comparison switches from relative to absolute
REL_SCALE_FLOOR = 1e-6


def relative_error(analytic: float, numeric: float) -> float:
    scale = max(abs(analytic), abs(numeric))
    diff = abs(analytic - numeric)
    return diff if scale < REL_SCALE_FLOOR else diff / scale


def gradient_check(
    loss_fn: Callable[[], float],
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    step: float = FD_STEP,
    max_coords_per_array: int = 64,
    rng: np.random.Generator | int | None = None,
) -> float:
    """Max error between analytic gradients and central finite differences.

    ``loss_fn`` must recompute the loss from the current contents of
    ``params`` (the arrays are perturbed in place and restored). Arrays
    larger than ``max_coords_per_array`` are subsampled.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    worst = 0.0
    for name, arr in params.items():
        if arr.dtype != np.float64:
            raise ValueError(f"gradient check requires float64 parameters, {name!r} is {arr.dtype}")
        flat = arr.reshape(-1)
        grad_flat = grads[name].reshape(-1)
        if flat.size <= max_coords_per_array:
            coords = np.arange(flat.size)
        else:
            coords = rng.choice(flat.size, size=max_coords_per_array, replace=False)
        for j in coords:
            original = flat[j]
            flat[j] = original + step
            plus = loss_fn()
            flat[j] = original - step
            minus = loss_fn()
            flat[j] = original
            if not (np.isfinite(plus) and np.isfinite(minus)):
                raise ArithmeticError(f"non-finite loss while perturbing {name!r}[{j}]")
            numeric = (plus - minus) / (2.0 * step)
            worst = max(worst, relative_error(float(grad_flat[j]), numeric))
    return worst
