"""Error taxonomy shared by all stages; the CLI maps these to exit codes."""


class ConfigError(ValueError):
    """Invalid parameter or configuration (exit code 2)."""


class DataError(ValueError):
    """Malformed or inconsistent input data (exit code 3)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or produced non-finite values (exit code 4)."""


EXIT_CODES = {
    ConfigError: 2,
    DataError: 3,
    NumericalError: 4,
}


def exit_code_for(exc: BaseException) -> int:
    for klass, code in EXIT_CODES.items():
        if isinstance(exc, klass):
            return code
    return 1
