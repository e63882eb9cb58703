"""Exception hierarchy shared across the engine.

Errors are reserved for malformed inputs and broken preconditions.
Ordinary interaction outcomes (placing a token on an empty cell, undoing
with an empty history, ...) are reported as signals, not exceptions.
"""


class StoryGridError(Exception):
    """Base class for every error raised by this package."""


class InvalidCellError(StoryGridError):
    """A cell coordinate lies outside the 8x8 grid."""


class OutOfBoundsError(StoryGridError):
    """A rectangle would not fit fully on the board."""


class UnknownObjectError(StoryGridError):
    """An operation referenced an object id that is not on the board."""


class InvalidResizeError(StoryGridError):
    """An edge resize would produce a degenerate or off-board rectangle."""


class ManifestError(StoryGridError):
    """Base class for poster manifest and layout snapshot parse errors."""


class ManifestSyntaxError(ManifestError):
    """The document is not valid JSON or does not match the schema."""


class DuplicateIdError(ManifestError):
    """Two declared objects (or two snapshot entries) share an id."""


class TooManyChannelsError(ManifestError):
    """An object declares more than two audio/video channels."""


class DanglingLayoutRefError(ManifestError):
    """A manifest's initial layout references an undeclared object id."""


class UnknownSnapshotObjectError(StoryGridError):
    """A snapshot being restored references an id missing from the poster."""


class LogError(StoryGridError):
    """Base class for event-log parse errors."""


class LogSyntaxError(LogError):
    """A log line is not valid JSON or does not match the record schema."""


class NonMonotonicTimestampError(LogError):
    """A log record's timestamp is earlier than its predecessor's."""


class UnknownPosterError(StoryGridError):
    """A session was requested for a poster id that was never registered."""


class UnknownSessionError(StoryGridError):
    """A request referenced a session id that does not exist."""
