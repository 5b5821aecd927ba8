"""Central-difference validation of analytic gradients."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

LossAndGrads = Callable[[Sequence[np.ndarray]], tuple[float, list[np.ndarray]]]


def finite_difference_check(
    function: LossAndGrads,
    parameters: Sequence[np.ndarray],
    epsilon: float = 1e-6,
    samples_per_param: int = 6,
    rng: np.random.Generator | None = None,
) -> float:
    """Compare analytic gradients against central differences.

    `function` maps the parameter list to (loss, gradients). Coordinates are
    sampled per parameter (all of them when the parameter is small) and each
    is perturbed by +-epsilon in place. Returns the maximum relative error

        |analytic - numeric| / (|analytic| + 1e-8)

    over all sampled coordinates.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    parameters = [np.asarray(p, dtype=np.float64) for p in parameters]
    _, grads = function(parameters)
    worst = 0.0
    for pi, p in enumerate(parameters):
        if p.size <= samples_per_param:
            coords = np.arange(p.size)
        else:
            coords = rng.choice(p.size, size=samples_per_param, replace=False)
        for flat in coords:
            original = p.flat[flat]
            p.flat[flat] = original + epsilon
            loss_plus, _ = function(parameters)
            p.flat[flat] = original - epsilon
            loss_minus, _ = function(parameters)
            p.flat[flat] = original
            numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
            analytic = grads[pi].flat[flat]
            rel = abs(analytic - numeric) / (abs(analytic) + 1e-8)
            if rel > worst:
                worst = float(rel)
    return worst
