from __future__ import annotations

import logging
import math
from enum import Enum
from typing import Optional

from svrgol.exceptions import InvalidArgumentError
from svrgol.learners.adagrad import DEFAULT_EPSILON, AdaGradLearner
from svrgol.learners.base import OnlineLearner
from svrgol.learners.coin_betting import CoinBettingLearner
from svrgol.learners.constant_step import ConstantStepLearner

logger = logging.getLogger(__name__)


class LearnerKind(Enum):
    ADAGRAD = "adagrad"
    COIN = "coin"
    CONST = "const"


class LearnerFactory:
    @staticmethod
    def coin_scale(G: float, bias_bound: float = 0.0) -> float:
        """Bound on variance-reduced gradient coordinates: ``2G + B``."""
        scale = 2.0 * G + bias_bound
        if scale <= 0:
            # all-zero features; any positive scale keeps the bettor well defined
            return 1.0
        return scale

    @staticmethod
    def create(
        kind: LearnerKind,
        dim: int,
        G: float,
        eta: Optional[float] = None,
        epsilon: float = DEFAULT_EPSILON,
        diameter: float = math.inf,
        bias_bound: float = 0.0,
    ) -> OnlineLearner:
        logger.debug("Creating %s learner (dim=%s, eta=%s, diameter=%s)", kind.value, dim, eta, diameter)
        if kind == LearnerKind.ADAGRAD:
            return AdaGradLearner(dim, eta=eta, epsilon=epsilon, diameter=diameter)
        if kind == LearnerKind.COIN:
            return CoinBettingLearner(dim, G=LearnerFactory.coin_scale(G, bias_bound), diameter=diameter)
        if kind == LearnerKind.CONST:
            if eta is None:
                raise InvalidArgumentError("The const learner requires an explicit eta")
            return ConstantStepLearner(dim, eta=eta, diameter=diameter)
        raise InvalidArgumentError(f"Unknown learner kind: {kind}")
