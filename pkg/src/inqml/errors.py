"""Exception hierarchy shared by all modules."""


class InqmlError(Exception):
    pass


class FormulaSyntaxError(InqmlError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class NonDeclarativeError(InqmlError, ValueError):
    pass


class UnknownAtomError(InqmlError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ForeignWorldError(InqmlError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SignatureMismatchError(InqmlError, ValueError):
    pass


class SizingError(InqmlError, ValueError):
    """A computation would exceed a documented size cap."""


class ModelFormatError(InqmlError, ValueError):
    pass


class UnknownConditionError(InqmlError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class PointKindError(InqmlError, TypeError):
    pass
