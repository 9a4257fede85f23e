"""Exception types raised across the simulation stack."""


class TedhrError(Exception):
    """Base class for every error raised by this package."""


class GimbalLock(TedhrError):
    """Euler angles requested too close to pitch = +-90 deg."""


class SingularMap(TedhrError):
    """The Euler-rate map W(delta) is not invertible at this attitude."""


class RankDeficient(TedhrError):
    """Allocation matrices lack the rank needed for full actuation."""


class DegenerateKernel(TedhrError):
    """F restricted to ker(M) is singular, so no zero-moment input exists."""


class DegenerateDirection(TedhrError):
    """The preferential-direction vector vanished (free-fall reference)."""


class ThrustUnderflow(TedhrError):
    """The HC force intensity dropped below its lower guard."""


class NotStabilizable(TedhrError):
    """The Riccati solver could not produce a stabilizing solution."""


class NonFinite(TedhrError):
    """The integrated state left the finite range."""


class BufferUnderrun(TedhrError):
    """The measurement history does not reach back far enough for the delay."""


class OutOfLayer(TedhrError):
    """Altitude outside the tropospheric layer of the atmosphere model."""


class OutOfRange(TedhrError):
    """Time requested outside the scenario window."""


class ConfigError(TedhrError, ValueError):
    """Inconsistent or invalid configuration values."""


class IoError(TedhrError, OSError):
    """Result files could not be written."""
