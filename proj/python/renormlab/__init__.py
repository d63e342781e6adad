import json

from . import _core
from ._core import (
    CircleMap,
    CombinatorialMismatch,
    DomainError,
    Error,
    HypothesisViolation,
    NonRenormalizable,
    PrecisionExhausted,
    RationalLock,
    conjugate_by_sine,
    critical_sine_map,
    default_sigma,
    discrepancy,
    fine_grid,
    heights,
    pair_distance,
    partition_lengths,
    rotation_map,
    rotation_number,
    tuned_sine,
    yoccoz_profile,
)


# the report functions return JSON documents; decode them here
def smoothness(f, g, depth, threshold=1000):
    return json.loads(_core.smoothness(f, g, depth, threshold))


def surgery(f, quotients, levels, sigma=0.0, depth=8, precision="dd"):
    return json.loads(_core.surgery(f, quotients, levels, sigma, depth, precision))


def verify(only="", seed=1):
    return json.loads(_core.verify(only, seed))
