"""Seeded problem instances: random non-negative data, synthetic images, noise."""
import numpy as np

from ..errors import ValidationError
from ..linalg import as_matrix, numerical_rank


def gen_nonneg_instance(m, n, seed):
    """``m x n`` matrix with i.i.d. Uniform[0, 1] entries."""
    if m < 1 or n < 1:
        raise ValidationError("dimensions must be positive")
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=(int(m), int(n)))


def _column_patterns(rng, n, rank):
    while True:
        C = np.zeros((rank, n))
        for g in range(rank):
            for _ in range(rng.integers(1, 4)):
                a, b = np.sort(rng.choice(n + 1, size=2, replace=False))
                C[g, a:b] = 1.0
        if numerical_rank(C, 1e-9) == rank:
            return C


def synth_low_rank_image(m, n, rank, seed):
    """Binary {0, 255} image of exact rank ``rank``.

    The rows are split into ``rank`` disjoint horizontal bands separated by
    background gaps; every row of band ``g`` repeats a stripe pattern ``c_g``
    made of one to three column intervals. The patterns are redrawn until
    linearly independent, so the image is a sum of ``rank`` binary outer
    products with disjoint row supports.
    """
    if rank < 1 or rank > min(m, n):
        raise ValidationError(f"rank must lie in [1, min(m, n)] = [1, {min(m, n)}]")
    rng = np.random.default_rng(seed)
    C = _column_patterns(rng, n, rank)
    # 2*rank interior cut points give rank bands, each at least one row tall
    if m - 1 >= 2 * rank:
        cuts = np.sort(rng.choice(np.arange(1, m), size=2 * rank, replace=False))
        edges = np.concatenate([[0], cuts, [m]])
        bands = [(edges[2 * g + 1], edges[2 * g + 2]) for g in range(rank)]
    else:
        bounds = np.linspace(0, m, rank + 1).astype(int)
        bands = list(zip(bounds[:-1], bounds[1:]))
    img = np.zeros((m, n))
    for g, (lo, hi) in enumerate(bands):
        img[lo:hi] = C[g]
    return 255.0 * img


def add_gaussian_noise(img, sigma, seed):
    """``img`` plus i.i.d. N(0, sigma^2) noise; no clipping."""
    img = as_matrix(img, "img")
    if sigma < 0:
        raise ValidationError("sigma must be non-negative")
    if sigma == 0:
        return img.copy()
    return img + sigma * np.random.default_rng(seed).standard_normal(img.shape)


def pick_pins(shape, fraction, seed):
    """Boolean mask with ``round(fraction * size)`` entries chosen uniformly."""
    if not 0.0 <= fraction <= 1.0:
        raise ValidationError("pin fraction must lie in [0, 1]")
    size = int(np.prod(shape))
    count = int(round(fraction * size))
    mask = np.zeros(size, dtype=bool)
    mask[np.random.default_rng(seed).choice(size, size=count, replace=False)] = True
    return mask.reshape(shape)
