"""Canonical JSON encoding shared by every file the tool writes."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import LoadError


def dumps(obj: Any) -> str:
    """Sorted keys, 2-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_bytes(obj: Any) -> bytes:
    return dumps(obj).encode("utf-8")


def read(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise LoadError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: invalid JSON ({exc})") from None


def write(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path
