__all__ = [
    'OperatorQError', 'DimensionError', 'ConvergenceError',
    'SingularSystemError', 'NonFiniteError', 'DatasetParseError',
    'FormatVersionError', 'ConfigError', 'EmptyInputError',
    'UnknownNameError']


class OperatorQError(Exception):
    def __init__(self, message):
        super(OperatorQError, self).__init__(message)
        self.message = message

    def __str__(self):
        return type(self).__name__ + ': ' + self.message


class DimensionError(OperatorQError):
    def __init__(self, what, expected, got):
        super(DimensionError, self).__init__(
            "Dimension mismatch for {what}. "
            "Expected {expected} instead of {got}.".format(
                what=what, expected=expected, got=got))
        self._expected = expected
        self._got = got

    @property
    def expected(self):
        return self._expected

    @property
    def got(self):
        return self._got


class ConvergenceError(OperatorQError):
    def __init__(self, iterations, residual):
        super(ConvergenceError, self).__init__(
            "No convergence after {iterations} iterations. "
            "Last sup-norm change was {residual:.3e}.".format(
                iterations=iterations, residual=residual))
        self._iterations = iterations
        self._residual = residual

    @property
    def iterations(self):
        return self._iterations

    @property
    def residual(self):
        return self._residual


class SingularSystemError(OperatorQError):
    def __init__(self, what, suggestion=None):
        message = "Can't solve {}. The system is singular.".format(what)
        if suggestion:
            message += " " + suggestion
        super(SingularSystemError, self).__init__(message)
        self._suggestion = suggestion

    @property
    def suggestion(self):
        return self._suggestion


class NonFiniteError(OperatorQError):
    def __init__(self, what, layer=None):
        if layer is None:
            message = "Non-finite values in {}.".format(what)
        else:
            message = "Non-finite values in {} at layer {}.".format(what, layer)
        super(NonFiniteError, self).__init__(message)
        self._layer = layer

    @property
    def layer(self):
        return self._layer


class DatasetParseError(OperatorQError):
    def __init__(self, path, line, reason):
        super(DatasetParseError, self).__init__(
            "Can't parse {path} at line {line}: {reason}".format(
                path=path, line=line, reason=reason))
        self._path = path
        self._line = line

    @property
    def path(self):
        return self._path

    @property
    def line(self):
        return self._line


class FormatVersionError(OperatorQError):
    def __init__(self, what, expected, got):
        super(FormatVersionError, self).__init__(
            "Unsupported {what} format_version {got}. "
            "Expected {expected}.".format(what=what, expected=expected, got=got))
        self._expected = expected
        self._got = got

    @property
    def expected(self):
        return self._expected

    @property
    def got(self):
        return self._got


class ConfigError(OperatorQError):
    def __init__(self, key, reason):
        super(ConfigError, self).__init__(
            "Invalid config key '{key}': {reason}".format(key=key, reason=reason))
        self._key = key

    @property
    def key(self):
        return self._key


class EmptyInputError(OperatorQError):
    pass


class UnknownNameError(OperatorQError):
    def __init__(self, kind, name, valid):
        super(UnknownNameError, self).__init__(
            "Unknown {kind} '{name}'. Choose from: {valid}".format(
                kind=kind, name=name, valid=', '.join(valid)))
        self._name = name
        self._valid = list(valid)

    @property
    def name(self):
        return self._name

    @property
    def valid(self):
        return self._valid
