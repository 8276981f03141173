"""Text preprocessing and pairwise similarity techniques (VSM, JSD, BLEU, greedy, optimum)."""

from .preprocess import preprocess, split_identifiers
from .similarity import (
    TECHNIQUES,
    CorpusStats,
    bleu_similarity,
    greedy_similarity,
    jsd_similarity,
    optimum_similarity,
    similarity,
    term_sim_exact,
    vsm_similarity,
)

__all__ = [
    "TECHNIQUES",
    "CorpusStats",
    "bleu_similarity",
    "greedy_similarity",
    "jsd_similarity",
    "optimum_similarity",
    "preprocess",
    "similarity",
    "split_identifiers",
    "term_sim_exact",
    "vsm_similarity",
]
