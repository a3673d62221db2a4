"""Exception hierarchy shared by all wildcohom modules.

The CLI maps these onto process exit codes: parse errors exit with 2,
precondition failures with 3, verification mismatches with 4 and internal
consistency failures with 5.
"""


class WildcohomError(Exception):
    """Base class for all library errors."""


class ParseError(WildcohomError):
    """Malformed input file or selector string."""


class PreconditionError(WildcohomError):
    """An operation was called outside its documented domain."""


class VerificationError(WildcohomError):
    """An oracle contradicted a closed-form prediction."""


class InternalError(WildcohomError):
    """An internal consistency assertion failed; indicates a library bug."""


# -- precondition failures ---------------------------------------------------

class UndefinedForZero(PreconditionError):
    """Valuation of the zero function requested."""


class NonRationalPlace(PreconditionError):
    """Residue-dependent operation at a place of degree > 1."""


class NotNilpotent(PreconditionError):
    """Matrix fed to a Jordan-type routine is not nilpotent of the right index."""


class NotStandardized(PreconditionError):
    """Cover must be brought to standard form first."""


class DisconnectedCover(PreconditionError):
    """The defining function is trivial: the cover splits into p copies."""


class HypothesisFails(PreconditionError):
    """Derivative criterion for the ramification jump does not apply."""


class NotNormal(PreconditionError):
    """A stabilizer subgroup is not normal."""


class StabilizersDontGenerate(PreconditionError):
    """Branch stabilizers generate a proper subgroup; no normal-basis element
    with bounded poles can exist."""


class LayerNotStandard(PreconditionError):
    """A tower layer could not be certified to admit a global standard form."""


class MixedRamification(PreconditionError):
    """A tower layer is neither totally ramified nor unramified above a tracked
    place, or its valuations could not be resolved exactly."""


class ParameterViolation(PreconditionError):
    """Family parameters violate a required inequality or divisibility."""


class ConditionBFails(PreconditionError):
    """The pole-bound/trace certificate could not be established."""


# -- verification failures ---------------------------------------------------

class IdentityViolated(VerificationError):
    """A polynomial identity failed on a concrete assignment."""


class NotStabilized(VerificationError):
    """Truncated de Rham model changed between consecutive margins."""


class DimensionMismatch(VerificationError):
    """Truncated de Rham model has the wrong dimension at both margins."""


# -- internal assertions -----------------------------------------------------

class GenusMismatch(InternalError):
    """Basis size disagrees with the genus; constraints were mis-derived."""


class ActionNotStable(InternalError):
    """A group action left the space it was supposed to preserve."""


class TraceDegreeOverflow(InternalError):
    """An exponent exceeded the range covered by the trace table."""
