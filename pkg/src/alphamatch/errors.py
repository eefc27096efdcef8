"""Exception hierarchy shared by all alphamatch modules."""

from __future__ import annotations


class AlphamatchError(Exception):
    """Base class for all domain errors raised by this package."""

    #: machine-readable category used by the CLI (kebab-case)
    category = "error"


class InvalidInstance(AlphamatchError):
    category = "invalid-instance"

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("; ".join(self.violations) or "invalid instance")


class InfeasiblePins(AlphamatchError):
    category = "infeasible-pins"


class InfeasibleAssignment(AlphamatchError):
    category = "infeasible-assignment"


class InfeasibleMatching(AlphamatchError):
    category = "infeasible-matching"


class MalformedMatching(AlphamatchError):
    category = "malformed-matching"


class InvalidKnapsack(AlphamatchError):
    category = "invalid-knapsack"


class IncompletePreferences(AlphamatchError):
    category = "incomplete-preferences"


class MalformedCsv(AlphamatchError):
    category = "malformed-csv"


class StrictIncompleteUnmatched(AlphamatchError):
    category = "strict-incomplete-unmatched"

    def __init__(self, unmatched):
        self.unmatched = tuple(unmatched)
        super().__init__(
            f"families {list(self.unmatched)} exhausted their lists and strict mode "
            "forbids fallback placement"
        )


class LimitExceeded(AlphamatchError):
    """Node or time budget exhausted before the search proved optimality."""

    category = "limit-exceeded"

    def __init__(self, message, *, best_bound, incumbent_welfare, nodes):
        self.best_bound = best_bound
        self.incumbent_welfare = incumbent_welfare
        self.nodes = nodes
        super().__init__(
            f"{message} (nodes={nodes}, best_bound={best_bound}, "
            f"incumbent_welfare={incumbent_welfare})"
        )
