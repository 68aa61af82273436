"""
Toolkit errors

Every failure a service can report is a ToolkitError with a human detail and
the process exit code the CLI uses for it.
"""


class ToolkitError(Exception):
    """Base error carrying a detail message and an exit code"""

    exit_code: int = 1

    def __init__(self, detail: str = "", exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail or self.__class__.__name__
        if exit_code is not None:
            self.exit_code = exit_code

    @property
    def name(self) -> str:
        return self.__class__.__name__


# ============================================
# Geometry
# ============================================

class DegenerateShrink(ToolkitError):
    """Shrinking would make some side empty"""


class UnsupportedDim(ToolkitError):
    """Requested mode is not available in this dimension"""


# ============================================
# Cross-sections and measures
# ============================================

class NotLacunaryInput(ToolkitError):
    """Input cross-section is not lacunary for the requested body"""


class NotLacunary(ToolkitError):
    """Translates c+U overlap"""


class UnknownAnchor(ToolkitError):
    """Point is not part of the tiling's cross-section"""


class PreconditionError(ToolkitError):
    """A documented precondition does not hold"""


# ============================================
# Diophantine
# ============================================

class BelowThreshold(ToolkitError):
    """Value lies below the approximation threshold N(eps)"""


class NotRepresentable(ToolkitError):
    """Length is not m1 + m2*alpha with non-negative integers"""


class NoAdmissiblePair(ToolkitError):
    """No (m1, m2) meets both the error bound and the remainder caps"""


# ============================================
# Tilings and towers
# ============================================

class WindowTooSmall(ToolkitError):
    """Window cannot host the requested construction"""


class TilesTooSmall(ToolkitError):
    """Inscribed copies leave too large a remainder"""


class NotMultiple(ToolkitError):
    """Side length is not a multiple of 1+alpha"""


class SnapConflict(ToolkitError):
    """Snapped windows could not be made disjoint"""


# ============================================
# Back-and-forth
# ============================================

class ProviderExhausted(ToolkitError):
    """Fragment generator refused to issue a fresh tile"""


class TypeMismatch(ToolkitError):
    """Seed pairs tiles of different types"""


class LabelMismatch(ToolkitError):
    """Seed bijection is not consistent on fragment labels"""


class InconsistentRatio(ToolkitError):
    """Normalization ratios differ within one label"""
