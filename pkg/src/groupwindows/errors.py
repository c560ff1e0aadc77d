"""Exception types shared across the package."""


class InputError(ValueError):
    """An argument or input file violates an operation's contract."""


class UndeterminedAtWindowError(RuntimeError):
    """The question cannot be settled at the given window length.

    Raised when a computation would need coordinates beyond the window to
    produce an honest verdict and the caller did not ask to accept partial
    results.
    """


class WindowScaleError(RuntimeError):
    """An exact scan was requested on a group too large to enumerate."""
