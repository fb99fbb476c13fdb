from typing import Any, Optional

from pydantic import BaseSettings, ValidationError, validator

from padiccf.exceptions import ConfigError
from padiccf.models import Rational


class Configuration(BaseSettings):
    """
    Provide storage for global configurations.

    Every field can be preset through an environment variable with the "PADICCF_"
    prefix, e.g. PADICCF_THREADS=4.
    """

    threads: int = 1
    max_terms: int = 200
    digits_per_term: int = 16
    precision_retries: int = 1
    subspace_epsilon: Rational = Rational(1, 10)
    start_index: int = 1
    schema_version: int = 1

    class Config:
        env_prefix = "PADICCF_"
        validate_assignment = True

    @validator("threads", "max_terms", "digits_per_term")
    def must_be_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @validator("precision_retries", "start_index")
    def must_not_be_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must not be negative")
        return value

    def default_precision(self, max_terms: Optional[int] = None) -> int:
        """
        The number of certified square root digits used for an expansion of the given
        length.
        """
        return self.digits_per_term * (max_terms or self.max_terms)


CONF = Configuration()


def configure(**overrides: Any) -> None:
    """
    Override global configurations.

    :param overrides: Field names of Configuration and their new values, for example
    threads=4 or max_terms=500.
    :raise ConfigError: If a field is unknown or a value is invalid.
    """
    for name, value in overrides.items():
        if name not in Configuration.__fields__:
            raise ConfigError(f"Unknown configuration '{name}'")
        try:
            setattr(CONF, name, value)
        except ValidationError as e:
            raise ConfigError(f"Invalid value for '{name}': {value!r}") from e
