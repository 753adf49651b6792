"""
Runtime settings for presslim.

Values come from the environment, falling back to the defaults in consts.
"""

import os
from dataclasses import dataclass
from typing import Self

from presslim import consts
from presslim.exceptions import ProjectException


class ImproperlyConfigured(ProjectException):
    """
    Raised when an environment variable holds a value that can't be used.
    """
    pass


@dataclass(frozen=True)
class Settings:
    budget: int = consts.DEFAULT_STATE_BUDGET
    log_level: str = consts.DEFAULT_LOG_LEVEL

    @classmethod
    def from_env(cls) -> Self:
        raw_budget = os.environ.get(consts.BUDGET_ENV_VAR)
        if raw_budget is None:
            budget = consts.DEFAULT_STATE_BUDGET
        else:
            try:
                budget = int(raw_budget)
            except ValueError:
                raise ImproperlyConfigured(f"{consts.BUDGET_ENV_VAR}={raw_budget!r} is not an integer.")
            if budget < 1:
                raise ImproperlyConfigured(f"{consts.BUDGET_ENV_VAR} must be positive, got {budget}.")

        log_level = os.environ.get(consts.LOG_LEVEL_ENV_VAR, consts.DEFAULT_LOG_LEVEL).upper()
        return cls(budget=budget, log_level=log_level)

    def __str__(self):
        return f"Settings<{self.budget=}, {self.log_level=}>"


def state_budget(override: int | None = None) -> int:
    """
    Budget for materialized compiled states: explicit argument first, then environment.
    """

    if override is not None:
        return override
    return Settings.from_env().budget
