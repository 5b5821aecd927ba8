"""Per-subject radiomic evidence-set retrieval.

Builds a fixed-size evidence set of radiomic features for each subject with
a reward-supervised two-stage retriever, classifies from that set alone, and
ships brute-force oracles that audit the retrieval approximation at small
scale.
"""

__version__ = "0.1.0"
