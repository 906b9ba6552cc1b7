"""
Early stopping with best-epoch restoration.
"""
import logging
from typing import Any, Optional

logger = logging.getLogger(__name__)


class EarlyStopping:
    """
    Stop when the monitored loss fails to improve by `min_delta` for
    `patience` consecutive epochs after the last improvement.

    patience=0 stops at the first non-improving epoch.

    The snapshot kept for restoration is the one with the lowest monitored
    loss seen, even when that epoch did not beat the previous best by
    `min_delta`, so the restored model is never worse than any traced epoch.
    """

    def __init__(self, patience: int = 10, min_delta: float = 0.0):
        self.patience = patience
        self.min_delta = min_delta
        self.wait = 0
        self.best_loss = float("inf")      # reference for the patience counter
        self.lowest_loss = float("inf")    # reference for restoration
        self.best_epoch: Optional[int] = None
        self.best_state: Any = None
        self.early_stop = False

    def __call__(self, epoch: int, loss: float, state: Any = None) -> bool:
        """Record one epoch; returns True when training should stop"""
        if loss < self.lowest_loss:
            self.lowest_loss = loss
            self.best_epoch = epoch
            self.best_state = state

        if loss < self.best_loss - self.min_delta:
            self.best_loss = loss
            self.wait = 0
        else:
            self.wait += 1
            logger.debug(f"epoch {epoch}: no improvement ({self.wait}/{self.patience})")
            if self.wait >= max(self.patience, 1):
                self.early_stop = True
        return self.early_stop
