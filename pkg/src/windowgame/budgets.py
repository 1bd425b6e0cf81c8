"""Enumeration and size budgets, overridable through environment variables."""

import os
from dataclasses import dataclass

NODE_BUDGET_ENV = "WINDOWGAME_NODE_BUDGET"
PRESCRIPTION_BUDGET_ENV = "WINDOWGAME_PRESCRIPTION_BUDGET"
POLICY_BUDGET_ENV = "WINDOWGAME_POLICY_BUDGET"


@dataclass(frozen=True)
class Budgets:
    """Hard limits on exhaustive enumerations.

    max_nodes bounds history-tree and window enumerations, max_prescriptions
    bounds the joint prescription count of a truncated game, and max_policies
    bounds exhaustive window-policy searches.
    """

    max_nodes: int = 200_000
    max_prescriptions: int = 262_144
    max_policies: int = 65_536


def default_budgets() -> Budgets:
    """Budgets from the environment, falling back to the defaults above."""
    def _read(name, fallback):
        raw = os.environ.get(name)
        return fallback if raw is None else int(raw)

    return Budgets(
        max_nodes=_read(NODE_BUDGET_ENV, Budgets.max_nodes),
        max_prescriptions=_read(PRESCRIPTION_BUDGET_ENV, Budgets.max_prescriptions),
        max_policies=_read(POLICY_BUDGET_ENV, Budgets.max_policies),
    )
