from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from svrgol.exceptions import InvalidArgumentError
from svrgol.learners.base import OnlineLearner
from svrgol.linalg import DenseVector, SparseVector, Vector, l2_norm

logger = logging.getLogger(__name__)


class CoinBettingLearner(OnlineLearner):
    """Parameter-free learner: per-coordinate Krichevsky-Trofimov coin betting.

    Each coordinate bets a fraction ``beta_i = -S_i / (G (t + 1))`` of its wealth,
    where ``S_i`` is the running sum of (clipped) gradients. Gradient coordinates
    beyond ``±G`` are clipped and counted in ``clip_count``.

    With a finite ``diameter`` the learner plays the projection of its bet onto
    the ball and feeds the bettor the constraint-reduction surrogate gradient.
    """

    def __init__(
        self,
        dim: int,
        G: float,
        diameter: float = math.inf,
        center: Optional[DenseVector] = None,
        initial_wealth: float = 1.0,
    ) -> None:
        super().__init__(dim, diameter, center)
        if not G > 0 or not math.isfinite(G):
            raise InvalidArgumentError(f"Coin-betting scale G must be positive and finite, got {G}")
        if not initial_wealth > 0:
            raise InvalidArgumentError(f"initial_wealth must be positive, got {initial_wealth}")
        self.G = G
        self.wealth = np.full(dim, float(initial_wealth))
        self.gradient_sum = np.zeros(dim)
        self.t = 0

    def _bet(self) -> DenseVector:
        beta = -self.gradient_sum / (self.G * (self.t + 1))
        return beta * self.wealth

    def _unconstrained(self) -> DenseVector:
        return self.center + self._bet()

    def current(self) -> DenseVector:
        return self._project(self._unconstrained())

    def _surrogate(self, g: SparseVector) -> SparseVector:
        x = self._unconstrained()
        y = self._project(x)
        offset = x - y
        distance = l2_norm(offset)
        if distance == 0:
            return g
        dense = g.to_dense()
        if float(np.dot(dense, offset)) >= 0:
            return g
        return SparseVector.from_dense(0.5 * (dense + l2_norm(g) * offset / distance))

    def step(self, g: Vector) -> None:
        sparse = self._support(g)
        if self.bounded:
            sparse = self._surrogate(sparse)

        idx, values = sparse.indices, sparse.values
        clipped = np.clip(values, -self.G, self.G)
        clips = int(np.count_nonzero(clipped != values))
        if clips:
            self.clip_count += clips
            logger.debug("Clipped %s gradient coordinates to ±%s", clips, self.G)

        bet = -self.gradient_sum[idx] / (self.G * (self.t + 1)) * self.wealth[idx]
        self.wealth[idx] -= clipped * bet
        self.gradient_sum[idx] += clipped
        self.t += 1


def coin_betting_step(learner: CoinBettingLearner, g: Vector) -> CoinBettingLearner:
    learner.step(g)
    return learner
