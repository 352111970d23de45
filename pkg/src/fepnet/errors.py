"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a formula (e.g. a non-positive variance)."""


class DegenerateSpecError(ValueError):
    """Kernel parameters for which the characteristic scales diverge."""


class ConfigError(ValueError):
    """Invalid configuration. ``problems`` lists every violation found, not just the first."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InsufficientDataError(ValueError):
    """Too few observations to support a fit."""


class GrowthError(RuntimeError):
    pass


class RunError(RuntimeError):
    """A replicate failed; the message carries its index and seed for reproduction."""

    def __init__(self, index: int, seed: int, cause: BaseException):
        self.index, self.seed, self.cause = index, seed, cause
        super().__init__(f"replicate {index} (seed {seed}) failed: {type(cause).__name__}: {cause}")
