"""Error hierarchy mirroring the engine's CLI exit-code convention:
2 configuration, 3 data, 4 numeric."""


class BridgeError(Exception):
    exit_code = 1


class ConfigError(BridgeError):
    exit_code = 2


class CheckpointLoadError(ConfigError):
    """The model identifier could not be resolved or loaded."""


class DataError(BridgeError):
    exit_code = 3


class ManifestError(DataError):
    """Malformed manifest line; message carries path and line number."""


class DuplicateIdError(DataError):
    pass


class ImageDecodeError(DataError):
    """Unreadable or unusable image; message names the record id."""


class NumericError(BridgeError):
    exit_code = 4


class DimMismatchError(NumericError):
    pass


class NotNormalizedError(NumericError):
    pass
