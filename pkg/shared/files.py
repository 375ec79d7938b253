from collections.abc import Callable
from pathlib import Path

from shared.errors import OpfrError


def read_utf8(path: str | Path, error: Callable[[int, str], OpfrError]) -> str:
    """Read a text file, raising ``error(line, reason)`` on undecodable bytes."""
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        raise error(line, "file is not valid UTF-8 text") from None
