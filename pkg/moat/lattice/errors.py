"""
Errors raised by moat.lattice.

Every error carries the exit status the command line reports for it.
"""
from __future__ import annotations

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_REFUSED = 3
EXIT_VERIFY = 4


class LatticeError(RuntimeError):
    "generic moat.lattice error"

    exit_code = 1


class ValidationError(LatticeError, ValueError):
    "Input does not satisfy a documented precondition."

    exit_code = EXIT_VALIDATION


class ParseError(ValidationError):
    "An input file could not be understood."


class NonFundamentalDiscriminant(ValidationError):
    "The discriminant is not that of a maximal order."


class RealQuadraticUnsupported(ValidationError):
    "Only ℤ and imaginary quadratic orders are supported."


class DimensionMismatch(ValidationError):
    "Shapes or ambient spaces do not fit together."


class RingMismatch(ValidationError):
    "The lattices live over different coefficient rings."


class NotIntegral(ValidationError):
    "The form does not take integral values on the lattice."


class NotPositiveDefinite(ValidationError):
    "The form is not positive definite."


class KTooLarge(ValidationError):
    "The subspace dimension exceeds what the prime permits."


class NotIsotropic(ValidationError):
    "A subspace is not isotropic modulo q."


class UnsupportedCase(ValidationError):
    "No closed formula is available for this case."


class NonCommuting(ValidationError):
    "Hecke matrices that should commute do not."


class LatticesDifferAwayFromP(ValidationError):
    "The two lattices differ at some prime other than the one given."


class RefusedError(LatticeError):
    "A mathematical hypothesis cannot be certified; refusing to continue."

    exit_code = EXIT_REFUSED


class DyadicUnsupported(RefusedError):
    "Primes above 2 are only supported when they split."


class BadPrime(RefusedError):
    "The prime divides the discriminant or is otherwise unusable here."


class NoGeneratorFound(RefusedError):
    "The prime ideal has no generator: it is not principal."


class HypothesesUnverifiable(RefusedError):
    "The strong approximation hypotheses cannot be confirmed."


class NonPrincipalTraversalPrime(HypothesesUnverifiable):
    "A traversal prime is not principal."


class VerificationFailed(LatticeError):
    "An internal consistency check failed."

    exit_code = EXIT_VERIFY


class NotInRegistry(VerificationFailed):
    "A lattice matches none of the known class representatives."


class IncompleteGenus(NotInRegistry):
    "A neighbor fell outside the recorded genus."
