"""Exception types.  Validation problems subclass ``ValueError``; numerical
diagnostics subclass :class:`NumericalDiagnosticError`."""


class LabelError(ValueError):
    """An edge label is negative, non-integer, or exceeds the root-of-unity bound."""


class UnsupportedRegimeError(ValueError):
    """The operation is not defined in the requested deformation regime."""


class NumericalDiagnosticError(ArithmeticError):
    pass


class InadmissibleDenominatorError(NumericalDiagnosticError):
    pass


class ConvergenceError(NumericalDiagnosticError):
    pass


class DegenerateSpectrumError(NumericalDiagnosticError):
    pass
