"""Pure NumPy implementations of the hot loops.

These are the reference versions; ``_ckernels.pyx`` mirrors them operation
for operation so both backends produce the same bits on the Schauder
kernels.
"""

import numpy as np


def level_scales(levels):
    return np.array([2.0 ** (-0.5 * j - 1.0) for j in range(levels)])


def _check(coeffs, levels):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 2 or coeffs.shape[1] != (1 << levels):
        raise ValueError(f"expected (m, {1 << levels}) coefficients, got {coeffs.shape}")
    return coeffs


def schauder_synthesize(coeffs, levels):
    """Path values on the dyadic grid from Schauder coefficients, row-wise."""
    coeffs = _check(coeffs, levels)
    m = coeffs.shape[0]
    size = 1 << levels
    x = np.zeros((m, size + 1))
    x[:, size] = coeffs[:, 0]
    scales = level_scales(levels)
    for j in range(levels):
        nk = 1 << j
        span = size >> j
        half = span >> 1
        left = x[:, 0:size:span]
        right = x[:, span::span]
        x[:, half::span] = 0.5 * (left + right) + scales[j] * coeffs[:, nk:2 * nk]
    return x


def schauder_analyze(paths, levels):
    """Inverse of :func:`schauder_synthesize`."""
    paths = np.ascontiguousarray(paths, dtype=np.float64)
    size = 1 << levels
    if paths.ndim != 2 or paths.shape[1] != size + 1:
        raise ValueError(f"expected (m, {size + 1}) path values, got {paths.shape}")
    c = np.empty((paths.shape[0], size))
    c[:, 0] = paths[:, size]
    inv = 1.0 / level_scales(levels)
    for j in range(levels):
        nk = 1 << j
        span = size >> j
        half = span >> 1
        mid = paths[:, half::span]
        c[:, nk:2 * nk] = (mid - 0.5 * (paths[:, 0:size:span] + paths[:, span::span])) * inv[j]
    return c


def row_sup_abs(values):
    values = np.asarray(values, dtype=np.float64)
    if values.shape[1] == 0:
        return np.zeros(values.shape[0])
    return np.max(np.abs(values), axis=1)


def schauder_sup(coeffs, levels):
    """Sup norm of each synthesized path; the grid max is exact for these paths."""
    return row_sup_abs(schauder_synthesize(coeffs, levels))


def weighted_sq_norm(values, weights):
    values = np.asarray(values, dtype=np.float64)
    return (values * values) @ np.asarray(weights, dtype=np.float64)
