import csv
import json
import platform
from enum import Enum
from fractions import Fraction
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence

import pydantic
from pydantic import Field

from padiccf.configurations import CONF
from padiccf.lognumbers import LogNumber, decimal_digits
from padiccf.models import PadicModel
from padiccf.surds import SurdElement
from padiccf.utils import format_rational
from padiccf.valuations import Infinity

# Integers beyond this are written as strings so that JSON readers keep every digit.
SAFE_INTEGER = 2**53
# Above this many digits text conversion of an int is refused by recent Pythons.
DECIMAL_TEXT_LIMIT = 4000


class Report(PadicModel):
    """
    The payload written by every command: schema version, the command echo, results
    and warnings. Metadata about the environment is only added on request.
    """

    schema_version: int = Field(default_factory=lambda: CONF.schema_version)
    command: Dict[str, Any]
    results: Any
    warnings: List[str] = []
    metadata: Optional[Dict[str, str]] = None


def environment_metadata() -> Dict[str, str]:
    from padiccf import __version__

    return {
        "padiccf": __version__,
        "python": platform.python_version(),
        "platform": platform.platform(),
    }


def _integer(value: int) -> Any:
    if -SAFE_INTEGER < value < SAFE_INTEGER:
        return value
    if decimal_digits(value) < DECIMAL_TEXT_LIMIT:
        return str(value)
    return hex(value)


def jsonable(value: Any) -> Any:
    """
    Lower a result to JSON-native values.

    Example:
    >>> jsonable({"quotients": (Fraction(2), Fraction(-3, 5))})
    {'quotients': ['2', '-3/5']}
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Infinity):
        return str(value)
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, int):
        return _integer(value)
    if isinstance(value, float):
        return value
    if isinstance(value, SurdElement):
        return str(value)
    if isinstance(value, LogNumber):
        return value.as_json()
    if isinstance(value, pydantic.BaseModel):
        return {name: jsonable(getattr(value, name)) for name in value.__fields__}
    if isinstance(value, dict):
        return {str(jsonable(key)): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [jsonable(item) for item in value]
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def dumps(report: Report) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


def _cell(value: Any) -> str:
    value = jsonable(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def write_csv(
    stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
