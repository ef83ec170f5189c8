"""Exception types shared across the package."""


class SubtabError(Exception):
    """Base class for all package-specific errors."""


class InvalidSelectionError(SubtabError):
    """A cell selection references coordinates outside its source."""


class EmptyTableError(SubtabError):
    """An operation received a table with no usable content."""


class SelectorUnavailableError(SubtabError):
    """The remote selector endpoint could not be reached."""


class CorpusFormatError(SubtabError):
    """A corpus file violates the expected record schema."""
