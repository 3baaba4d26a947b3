"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class LlacaError(Exception):
    exit_code = 1


class ConfigError(LlacaError, ValueError):
    exit_code = 1


class DataError(LlacaError, ValueError):
    exit_code = 2


class IngestionError(DataError):
    pass


class AlignmentError(DataError):
    pass


class EmptyVocabularyError(DataError):
    pass


class NotInVocabularyError(DataError, KeyError):
    pass


class UpstreamError(LlacaError):
    exit_code = 3
