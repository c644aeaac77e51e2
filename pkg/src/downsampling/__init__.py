"""Learning and testing under product distributions by reduction to a uniform grid.

Samples from an unknown product distribution induce a block partition of
``R^d`` into ``r^d`` cells whose image law is close to uniform; learners and
testers then work on the grid ``{0..r-1}^d``.
"""

from .blockgrid import (
    AugmentedBlockPartition,
    BlockPartition,
    GridFunction,
    estimate_tv_to_uniform,
    induce_augmented_partition,
    induce_partition,
)
from .product_dist import LabeledOracle, ProductDistribution, Target, augment

__version__ = "0.1.0"

__all__ = [
    "AugmentedBlockPartition",
    "BlockPartition",
    "GridFunction",
    "LabeledOracle",
    "ProductDistribution",
    "Target",
    "augment",
    "estimate_tv_to_uniform",
    "induce_augmented_partition",
    "induce_partition",
]
