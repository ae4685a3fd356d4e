"""The four ensemble members: random forest, gradient boosting, MLP, isolation forest.

All models share a duck-typed scorer interface: score(x) -> float in [0, 1]
and score_batch(X) -> array of floats in [0, 1].
"""

from .boosting import GradientBoostedModel, train_gradient_boosted
from .forest import RandomForestModel, train_random_forest
from .isolation import IsolationForestModel, average_path_length, train_isolation_forest
from .mlp import MlpConfig, MlpModel, train_mlp
from .trees import Tree, grow_tree

__all__ = [
    "GradientBoostedModel",
    "IsolationForestModel",
    "MlpConfig",
    "MlpModel",
    "RandomForestModel",
    "Tree",
    "average_path_length",
    "grow_tree",
    "train_gradient_boosted",
    "train_isolation_forest",
    "train_mlp",
    "train_random_forest",
]
