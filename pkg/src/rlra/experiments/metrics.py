"""Image quality metrics in decibels."""
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..linalg import as_matrix, check_same_shape


@dataclass(frozen=True)
class QualityMetrics:
    psnr: float
    snr: float
    mse: float


def _pair(reference, test):
    ref = as_matrix(reference, "reference")
    tst = as_matrix(test, "test")
    check_same_shape(ref, tst, ("reference", "test"))
    return ref, tst


def mse(reference, test):
    ref, tst = _pair(reference, test)
    return float(np.mean((ref - tst) ** 2))


def psnr(reference, test, peak=255.0):
    """``10 log10(peak^2 / mse)``; ``inf`` when the images are identical."""
    if not peak > 0:
        raise ValidationError("peak must be positive")
    err = mse(reference, test)
    if err == 0.0:
        return float("inf")
    return float(10.0 * np.log10(peak ** 2 / err))


def snr(reference, test):
    """``10 log10(sum(ref^2) / sum((ref - test)^2))``; ``inf`` on exact match."""
    ref, tst = _pair(reference, test)
    noise = float(np.sum((ref - tst) ** 2))
    if noise == 0.0:
        return float("inf")
    return float(10.0 * np.log10(np.sum(ref ** 2) / noise))


def quality(reference, test, peak=255.0):
    return QualityMetrics(psnr(reference, test, peak), snr(reference, test), mse(reference, test))
