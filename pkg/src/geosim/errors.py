"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class GeosimError(Exception):
    """Base class for all engine errors."""


class RuleEvalError(GeosimError):
    """A rule failed while being evaluated for a specific individual."""

    def __init__(self, rule: str, subject, message: str):
        self.rule = rule
        self.subject = subject
        self.message = message
        super().__init__(f"rule {rule!r} failed for {subject!r}: {message}")


class StepError(GeosimError):
    """A synchronous step aborted; carries every rule failure it collected."""

    def __init__(self, failures: list[RuleEvalError]):
        self.failures = failures
        lines = "; ".join(str(f) for f in failures[:5])
        more = "" if len(failures) <= 5 else f" (+{len(failures) - 5} more)"
        super().__init__(f"step aborted with {len(failures)} rule failure(s): {lines}{more}")


class UnknownIdError(GeosimError):
    pass


class UnknownLayerError(GeosimError):
    pass


class InadmissibleShapeError(GeosimError):
    pass


class OutOfBoundsError(GeosimError):
    pass


class PastTimeError(GeosimError):
    """An event was scheduled before the current clock time."""


class SchedulerAborted(GeosimError):
    """A handler failed; the trace of already-processed events is attached."""

    def __init__(self, cause: Exception, trace):
        self.cause = cause
        self.trace = trace
        super().__init__(f"handler failed after {len(trace)} event(s): {cause}")


class ContradictionError(GeosimError):
    """Incoming information is incompatible with every possible world."""


class NonIncreasingTickError(GeosimError):
    pass


class MissingTemplateError(GeosimError):
    pass


class BackendError(GeosimError):
    """A mind backend failed: transport, timeout, or invalid output."""


class PlanValidationError(BackendError):
    """A synthesized plan referenced actions outside the agent's capabilities."""


class CompileError(GeosimError):
    """Internal compiler defect: a validated document failed to compile."""
