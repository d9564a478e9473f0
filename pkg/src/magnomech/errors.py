"""Error taxonomy shared by the library and the CLI.

ConfigError: a parameter bundle violates an invariant (CLI exit code 2).
NumericsError: a computation failed or hit a pathological regime (exit code 3).
"""


class ConfigError(ValueError):
    pass


class NumericsError(RuntimeError):
    pass
