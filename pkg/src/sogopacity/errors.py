"""Exception hierarchy shared by the whole package."""


class OpacityError(Exception):
    """Base class for every error raised by sogopacity."""


class ModelError(OpacityError):
    """A net, LTS or model file is malformed or inconsistent."""


class UnboundedNetError(ModelError):
    """Reachability exploration hit the configured state or token bound."""


class PreconditionError(OpacityError):
    """An operation was called outside its domain (e.g. firing a disabled transition)."""


class UsageError(OpacityError):
    """Operands do not belong together (e.g. state sets over different LTSs)."""


class EnforcementError(OpacityError):
    """Opacification could not be carried out on the given model."""
