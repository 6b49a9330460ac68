"""Exception hierarchy shared by the core modules and the CLI."""

from typing import Any, Dict, Optional


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""

    kind = "domain-error"

    def to_dict(self) -> Dict[str, Any]:
        """Return a machine-readable description of the error."""
        return {"error": self.kind, "message": str(self)}


class DegenerateFormError(DomainError):
    """Raised for singular Gram matrices or zero diagonal entries."""

    kind = "degenerate-form"


class InfeasibleError(DomainError):
    """Raised when requested symbols or invariants violate a constraint."""

    kind = "infeasible"

    def __init__(self, message: str, constraint: str = "") -> None:
        super().__init__(message)
        self.constraint = constraint

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["constraint"] = self.constraint
        return data


class PreconditionError(DomainError):
    """Raised when a documented hypothesis of a construction fails."""

    kind = "precondition"

    def __init__(self, message: str, condition: str = "") -> None:
        super().__init__(message)
        self.condition = condition

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["condition"] = self.condition
        return data


class UnsupportedExtensionSymbolError(DomainError):
    """Raised for biquadratic symbols at a non-unique, non-split dyadic place."""

    kind = "unsupported-extension-symbol"


class BoundExceededError(RuntimeError):
    """Raised when a configured search bound is exhausted."""

    kind = "bound-exceeded"

    def __init__(
        self, bound_name: str, bound: Optional[int], message: str = ""
    ) -> None:
        super().__init__(message or f"search bound '{bound_name}' ({bound}) exhausted")
        self.bound_name = bound_name
        self.bound = bound

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": self.kind,
            "message": str(self),
            "bound_name": self.bound_name,
            "bound": self.bound,
        }


class CertificationError(RuntimeError):
    """Raised when a freshly built witness fails its own re-verification."""

    kind = "certification-failed"

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.kind, "message": str(self)}
