"""Exception hierarchy shared by all isobar3 modules."""


class IsobarError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(IsobarError):
    """Invalid run configuration (bad file, bad field, bad combination)."""


class IoError(IsobarError):
    """Cache or report I/O failure, including checksum mismatches."""


# coefficient engine

class CapacityExceeded(IsobarError):
    """Requested table length is above the configured memory cap."""


class UnsupportedForm(IsobarError):
    """Non-default form requested without an external coefficient file."""


class SelfCheckFailed(IsobarError):
    """Hecke relation or multiplicativity violated; message names the first offender."""


# isobaric sums

class GridOutOfRange(IsobarError):
    """Evaluation point or window does not fit inside the table."""


class DegenerateFit(IsobarError):
    """Too few usable points to fit an error exponent."""


# L-function evaluation

class PoleEncountered(IsobarError):
    """Gamma-factor argument hit a nonpositive integer."""


class PrecisionUnreachable(IsobarError):
    """Coefficient table too short for the requested residual target."""


class SchemesDisagree(IsobarError):
    """The two independent L(1) schemes differ beyond the agreed digits."""

    def __init__(self, value_a, value_b, digits):
        self.value_a = value_a
        self.value_b = value_b
        self.digits = digits
        super().__init__(
            f"scheme (a) {value_a!r} vs scheme (b) {value_b!r} "
            f"disagree at {digits} digits"
        )


# exponent calculus

class DegenerateDenominator(IsobarError):
    """Objective denominator vanished; the pair is outside the valid region."""


class InfeasibleBudget(IsobarError):
    """The exponent budget admits no positive delta."""


class RegimeViolated(IsobarError):
    """A corner of the (T, L) region breaks a regime inequality."""

    def __init__(self, corner, inequality):
        self.corner = corner
        self.inequality = inequality
        super().__init__(f"corner {corner} violates {inequality}")


# oscillatory lab

class BadGeometry(IsobarError):
    """Window ramp does not fit (requires 0 < Y < X/4)."""


class QuadratureFailure(IsobarError):
    """Adaptive quadrature could not reach the requested accuracy."""


class NoStationaryPoint(IsobarError):
    """Phase has no stationary point inside the bump support.

    Carries the directly computed integral so callers can assert it is
    negligible against the bump mass.
    """

    def __init__(self, numeric, bump_mass):
        self.numeric = numeric
        self.bump_mass = bump_mass
        super().__init__(
            f"no stationary point in support; |integral| = {abs(numeric):.3e}, "
            f"bump mass = {bump_mass:.3e}"
        )


class TableTooShort(IsobarError):
    """Coefficient table does not cover the requested probe range."""
