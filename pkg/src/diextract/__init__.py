"""Unbiased bit extraction from biased coins and dice."""

from .coins import elias_extract, entropy, get_extractor, peres_extract, vn_extract
from .dice import (
    BinarizationTree,
    DieDistribution,
    DieSeq,
    build_tree,
    conditional_probs,
    generalized_extract,
    make_generalized,
    reconstruct,
)
from .fixed_k import InsufficientEntropyError, generate_k_bits, phi_k

__all__ = [
    "BinarizationTree",
    "DieDistribution",
    "DieSeq",
    "InsufficientEntropyError",
    "build_tree",
    "conditional_probs",
    "elias_extract",
    "entropy",
    "generalized_extract",
    "generate_k_bits",
    "get_extractor",
    "make_generalized",
    "peres_extract",
    "phi_k",
    "reconstruct",
    "vn_extract",
]
