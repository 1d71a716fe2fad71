"""Active-learning intrusion detection with per-host attack probabilities.

Pipeline: diversity-seeking query sampling (random, k-means, k-means with
feature bagging) -> oracle labeling -> Random Forest event classification
-> cumulative binomial aggregation of detections into per-host attack
probabilities.
"""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND

__all__ = ["__version__", "KERNEL_BACKEND"]
