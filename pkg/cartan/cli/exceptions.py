EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL_FAILURE = 3


class CliException(ValueError):
    exit_code = EXIT_NUMERICAL_FAILURE


class ConfigValidationError(CliException):
    """
    Configuration rejected by the schema or by the scenario registry
    """

    exit_code = EXIT_INVALID_CONFIG

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


class MissingConfigSection(ConfigValidationError):
    pass
