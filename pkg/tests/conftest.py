import numpy as np
import pytest

from rlra import constraints as cs


def constraint_variants(rng, m=5, n=4):
    """One instance of every constraint variant, paired with a compatible shape."""
    A = rng.standard_normal((m, n))
    mask = rng.random((m, n)) < 0.3
    mask[0, 0] = True
    lo = -rng.random((m, n))
    sq = (n, n)
    return [
        ("unconstrained", cs.Unconstrained(), (m, n)),
        ("nonnegative", cs.NonNegative(), (m, n)),
        ("box_scalar", cs.Box(-0.5, 0.5), (m, n)),
        ("box_array", cs.Box(lo, lo + rng.random((m, n))), (m, n)),
        ("fixed_entries", cs.FixedEntries(mask, rng.standard_normal((m, n))), (m, n)),
        ("hankel", cs.HankelStructure(), (m, n)),
        ("toeplitz", cs.ToeplitzStructure(), (m, n)),
        ("psd", cs.PsdCone(), sq),
        ("trace_hyperplane", cs.TraceHyperplane(A, 0.7), (m, n)),
        ("trace_halfspace", cs.TraceHalfSpace(A, 0.7), (m, n)),
        ("hankel_nonneg", cs.Intersection((cs.HankelStructure(), cs.NonNegative())), (m, n)),
        ("psd_trace", cs.Intersection((cs.PsdCone(), cs.TraceHyperplane(np.eye(n), 2.0))), sq),
        ("toeplitz_box", cs.Intersection((cs.ToeplitzStructure(), cs.Box(-0.3, 0.4))), (m, n)),
    ]


VARIANT_NAMES = [name for name, _, _ in constraint_variants(np.random.default_rng(0))]


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)
