"""Exception hierarchy shared by every module and mapped onto CLI exit codes."""


class OcalignError(Exception):
    exit_code = 1


class InputError(OcalignError, ValueError):
    """Malformed or inconsistent input data (log, net, alignment)."""

    exit_code = 4


class ResourceLimitExceeded(OcalignError):
    """A configured cap (states, bindings, count vectors, wall time) was hit."""

    exit_code = 3


class BindingNotEnabled(OcalignError, ValueError):
    pass
