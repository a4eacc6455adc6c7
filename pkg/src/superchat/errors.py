"""Exception hierarchy for the superchat package.

Every error raised by the package derives from SuperChatError so the CLI
can catch one type and exit with a single-line diagnostic.
"""


class SuperChatError(Exception):
    """Base class for all errors raised by this package."""


class LayoutError(SuperChatError):
    """Grid geometry is inconsistent (divisibility, row split, channels)."""


class BoundsError(SuperChatError):
    """Cell coordinates outside the grid."""


class CapacityError(SuperChatError):
    """Text does not fit the portion of the image it targets."""


class GlyphError(SuperChatError):
    """Glyph source cannot be constructed (bad font path, bad spec)."""


class IngestError(SuperChatError):
    """Corpus file is malformed; message carries the line number."""


class VocabularyError(SuperChatError):
    """No characters survive the frequency cutoff, or a label is unknown."""


class ManifestError(SuperChatError):
    """Manifest files are missing, inconsistent, or non-canonical."""


class ConfigError(SuperChatError):
    """Model or run configuration violates an invariant."""


class ShapeError(SuperChatError):
    """Image dimensions do not match the model input contract."""


class LabelError(SuperChatError):
    """Class label outside the vocabulary range."""


class CheckpointError(SuperChatError):
    """Checkpoint container is corrupt or has the wrong magic/version."""


class VocabMismatchError(SuperChatError):
    """Checkpoint vocabulary fingerprint differs from the manifest's."""


class DataError(SuperChatError):
    """A required example split is empty."""


class InputError(SuperChatError):
    """Decode input is empty after normalization."""


class ParameterError(SuperChatError):
    """Invalid runtime parameter (e.g. beam width 0)."""
