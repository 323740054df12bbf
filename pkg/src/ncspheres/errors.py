"""Exception hierarchy shared by the library and the command line."""


class UsageError(ValueError):
    """Bad input: mismatched presentations, unknown names, malformed specs."""


class DomainError(ValueError):
    """Numeric parameter outside its admissible range."""


class NormalizationError(RuntimeError):
    """Rewriting exceeded its step budget; the rule set does not terminate."""


class ParseError(UsageError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        pointer = " " * pos + "^"
        super().__init__(f"{message} at position {pos}\n  {text}\n  {pointer}")
