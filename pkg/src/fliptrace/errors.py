"""Exception taxonomy shared across the package.

Four failure classes cover everything the library can detect:

* ``ParameterError`` -- malformed or inconsistent user input (bad angle,
  mismatched algebras, out-of-range branch parameter).  The CLI maps these
  to exit code 2.
* ``ResolutionError`` -- a numerical resolution limit was hit: coefficient
  tails fail to decay below the prune threshold, a truncated representation
  did not stabilize, or an iteration ran out of its budget.
* ``GapError`` -- a compression is too far from being a projection for the
  spectral cutoff to be trustworthy (no gap around 1/2).
* ``IntegrityError`` -- an internal cross-check failed, e.g. a character
  produced by an automorphism does not match any basis class uniquely.
"""


class FliptraceError(Exception):
    """Base class for all package errors."""


class ParameterError(FliptraceError):
    """Invalid or inconsistent parameters (CLI exit code 2)."""


class ResolutionError(FliptraceError):
    """Numerical resolution exhausted (non-decaying tails, budget overrun)."""


class GapError(FliptraceError):
    """Spectrum of a compression has no usable gap around 1/2."""


class IntegrityError(FliptraceError):
    """A structural cross-check failed; results would be unreliable."""
