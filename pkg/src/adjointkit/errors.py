"""Exception hierarchy shared by all adjointkit modules.

Structured errors carry the offending objects so callers (and the CLI) can
render precise witnesses instead of opaque strings.
"""

from __future__ import annotations


class AdjointKitError(Exception):
    """Base class for every error raised by this package."""


class NotAPoset(AdjointKitError):
    """The declared order relation has a cycle or antisymmetry violation."""


class NotALattice(AdjointKitError):
    """Some pair of elements lacks a join or a meet."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class LatticeTooLarge(AdjointKitError):
    """Requested carrier exceeds the configured element cap."""


class TooManyWorlds(AdjointKitError):
    """Powerset carrier requested over more worlds than the hard limit."""


class ForeignElement(AdjointKitError):
    """An element was passed to a lattice it does not belong to."""


class NotDistributive(AdjointKitError):
    """Heyting operations need a distributive carrier."""


class NotBoolean(AdjointKitError):
    """Complement-based operations need a Boolean carrier."""


class MissingGenerator(AdjointKitError):
    """Generator assignments must cover the join-irreducibles exactly."""


class NotJoinPreserving(AdjointKitError):
    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class NotMeetPreserving(AdjointKitError):
    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class LatticeMismatch(AdjointKitError):
    """Two maps that must share a carrier do not."""


class UnknownAgent(AdjointKitError):
    pass


class UnknownAction(AdjointKitError):
    pass


class EmptyGroup(AdjointKitError):
    """Group operators are only defined for nonempty agent groups."""


class EmptyActionSet(AdjointKitError):
    pass


class NoMiracleViolation(AdjointKitError):
    """f_A(h_a(l)) is not below h_{f'_A(a)}(f_A(l)) for some (A, a, l)."""

    def __init__(self, agent, action, element, lhs, rhs):
        self.agent = agent
        self.action = action
        self.element = element
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"no-miracle violated for agent {agent!r}, action {action!r} at "
            f"{element.name}: {lhs.name} is not below {rhs.name}"
        )


class FactStabilityViolation(AdjointKitError):
    """A communication action pushed some l <= fact outside the fact."""

    def __init__(self, action, fact, element):
        self.action = action
        self.fact = fact
        self.element = element
        super().__init__(
            f"fact stability violated for action {action!r}: "
            f"{element.name} <= {fact.name} but its update is not"
        )


class KernelMismatch(AdjointKitError):
    """A declared kernel atom is not annihilated by its action's update."""


class WordLengthExceeded(AdjointKitError):
    """Quantale composition left the bounded-word carrier."""


class GeneratorMismatch(AdjointKitError):
    """Quantale generators do not coincide with the algebra's actions."""


class InternalError(AdjointKitError):
    """An internal invariant was breached; indicates a bug, not bad input."""


class ParseError(AdjointKitError):
    """Scenario text failed to parse; points at a concrete character."""

    def __init__(self, line, column, message, expected=None):
        self.line = line
        self.column = column
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"line {line}, column {column}: {message}{suffix}")


class ResolutionError(AdjointKitError):
    """A name used in a scenario is not declared."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
