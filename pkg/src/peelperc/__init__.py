"""Peeling-process simulator and exact-arithmetic library for Bernoulli
percolation on half-plane uniform infinite triangulations and
quadrangulations."""

from .exact import ExactValue, double_factorial, exact_rat
from .lattice import (
    MapType,
    PercolationModel,
    MapParams,
    PeelCase,
    map_params,
    partition_function,
    peel_weight,
    normalization_defect,
    moments,
    threshold,
    valid_pairs,
    OpenProblemError,
    LatticeError,
)

__version__ = "0.1.0"
