"""Typed errors shared across the package.

Each error class maps to one CLI exit code, so callers can distinguish
bad input from resonance poles from solver trouble without parsing
messages.
"""


class ConfigError(ValueError):
    """Invalid or malformed configuration (unknown key, bad value)."""


class DegenerateDenominator(ArithmeticError):
    """A closed-form denominator vanished; the parameter point sits on a pole.

    ``factor`` names the vanishing product so sweeps can report which
    resonance was hit.
    """

    def __init__(self, factor: str, magnitude: float):
        self.factor = factor
        self.magnitude = magnitude
        super().__init__(
            f"degenerate denominator: |{factor}| = {magnitude:.3e} below threshold"
        )


class SingularSystem(ArithmeticError):
    """The steady-state linear system could not be solved reliably."""


class NonlinearRegime(ArithmeticError):
    """Probe amplitudes too large for a linear-response extraction."""
