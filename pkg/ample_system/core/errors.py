"""
Exception hierarchy shared by the ample-complex toolkit.
"""

from typing import Any, Dict, Optional


class AmpleError(Exception):
    """Base class for every error raised by the toolkit."""

    kind = "error"

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by the CLI error report."""
        return {"error": self.kind, "message": str(self)}


class ComplexInputError(AmpleError, ValueError):
    """Malformed simplex, unknown vertex, overlapping join or invalid challenge."""

    kind = "input"


class ConfigError(AmpleError):
    """Configuration file could not be read or contains unknown keys."""

    kind = "config"


class BudgetExceededError(AmpleError):
    """A configured work budget would be exceeded."""

    kind = "budget"

    def __init__(self, budget: str, limit: Any, detail: str = ""):
        self.budget = budget
        self.limit = limit
        self.detail = detail
        message = f"budget '{budget}' exceeded (limit {limit})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data.update({"budget": self.budget, "limit": self.limit})
        return data


class TrialBudgetError(BudgetExceededError):
    """Sampled search ran out of trials."""

    kind = "trial_budget"


class FieldRangeError(AmpleError):
    """Modulus outside the supported 63-bit arithmetic range."""

    kind = "range"

    def __init__(self, message: str, required_bits: Optional[int] = None):
        self.required_bits = required_bits
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        if self.required_bits is not None:
            data["required_bits"] = self.required_bits
        return data


class UnsatisfiableLevelError(AmpleError):
    """The witness solver found no admissible exponent at some level."""

    kind = "unsatisfiable"

    def __init__(self, level: int, message: str = ""):
        self.level = level
        super().__init__(message or f"no admissible exponent at level {level}")

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["level"] = self.level
        return data


class WitnessNotFoundError(AmpleError):
    """A construction got stuck on a challenge with no witness."""

    kind = "no_witness"

    def __init__(self, message: str, challenge: Optional[Dict[str, Any]] = None):
        self.challenge = challenge
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        if self.challenge is not None:
            data["challenge"] = self.challenge
        return data
