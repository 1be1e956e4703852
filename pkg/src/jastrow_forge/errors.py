"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`JastrowForgeError`, so callers (the CLI in particular) can separate
check failures from bugs.
"""


class JastrowForgeError(Exception):
    """Base class for all library errors."""


class ValidationError(JastrowForgeError, ValueError):
    """A model specification violates one of its invariants."""


class NonPositiveConstant(ValidationError):
    pass


class SiteCountMismatch(ValidationError):
    pass


class UnsupportedConventionForFamily(ValidationError):
    pass


class InconsistentEnvelope(ValidationError):
    """Anharmonic envelope derivatives disagree with finite differences."""


class InvalidConfiguration(ValidationError):
    pass


class EvaluationAtNode(JastrowForgeError, ValueError):
    """A log-derivative was requested at zero separation."""


class CoincidentParticles(JastrowForgeError, ValueError):
    pass


class ConfinementMismatch(JastrowForgeError, ValueError):
    pass


class NodeConfiguration(JastrowForgeError, ValueError):
    """The configuration sits on a node of the wavefunction."""


class RejectionStarvation(JastrowForgeError, RuntimeError):
    pass


class NotACuspedModel(JastrowForgeError, ValueError):
    pass


class TooManyParticlesForSymmetrization(JastrowForgeError, ValueError):
    pass


class UnboundModel(JastrowForgeError, ValueError):
    pass


class NoConvergence(JastrowForgeError, RuntimeError):
    pass


class StuckChain(JastrowForgeError, RuntimeError):
    pass
