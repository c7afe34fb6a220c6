"""Threshold configuration shared by the multiplication, slice and division
engines.

The tuning file is flat text, one ``key = value`` per line, ``#`` starting
a comment.  Keys not present keep their defaults.  The file named by the
``BIGSLICE_TUNING`` environment variable, when it exists, is loaded the
first time `active` is called.
"""

from __future__ import annotations

import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

from .divengine import DivThresholds
from .mulengine import MulThresholds
from .sliceprod import MuldersConfig

ENV_VAR = "BIGSLICE_TUNING"

# key -> (section, type)
KEYS: dict[str, tuple[str, type]] = {
    "karatsuba_cutoff": ("mul", int),
    "parallel_cutoff": ("mul", int),
    "mulders_cutoff": ("mulders", int),
    "beta": ("mulders", float),
    "fast_cutoff": ("div", int),
    "block_ratio": ("div", float),
}


@dataclass(frozen=True)
class Tuning:
    mul: MulThresholds = field(default_factory=MulThresholds)
    mulders: MuldersConfig = field(default_factory=MuldersConfig)
    div: DivThresholds = field(default_factory=DivThresholds)

    def values(self) -> dict[str, int | float]:
        return {key: getattr(getattr(self, sec), key) for key, (sec, _) in KEYS.items()}

    def with_values(self, **kw: int | float) -> Tuning:
        """Copy with some thresholds replaced; validates the result."""
        groups: dict[str, dict] = {}
        for key, val in kw.items():
            if key not in KEYS:
                raise KeyError(f"unknown threshold {key!r}")
            sec, typ = KEYS[key]
            groups.setdefault(sec, {})[key] = typ(val)
        return replace(self, **{sec: replace(getattr(self, sec), **vals)
                                for sec, vals in groups.items()})

    def to_text(self, header: str | None = None) -> str:
        lines = []
        if header:
            lines += [f"# {h}" if h else "#" for h in header.splitlines()]
        for key, val in self.values().items():
            lines.append(f"{key} = {_fmt(val)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Tuning:
        vals: dict[str, int | float] = {}
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or not key or not val:
                raise ValueError(f"line {no}: expected 'key = value', got {raw!r}")
            if key not in KEYS:
                raise ValueError(f"line {no}: unknown threshold {key!r}")
            typ = KEYS[key][1]
            try:
                vals[key] = typ(val) if typ is float else int(val, 10)
            except ValueError:
                raise ValueError(f"line {no}: bad value for {key}: {val!r}") from None
        return cls().with_values(**vals)

    def save(self, path: str | os.PathLike, header: str | None = None) -> None:
        Path(path).write_text(self.to_text(header))

    @classmethod
    def load(cls, path: str | os.PathLike) -> Tuning:
        return cls.from_text(Path(path).read_text())


def _fmt(val: int | float) -> str:
    return str(val) if isinstance(val, int) else f"{val:.4g}"


_lock = threading.Lock()
_current: Tuning | None = None


def from_environment() -> Tuning:
    """Thresholds from ``$BIGSLICE_TUNING`` if it names a file, else defaults."""
    path = os.environ.get(ENV_VAR)
    if path and Path(path).is_file():
        return Tuning.load(path)
    return Tuning()


def active() -> Tuning:
    global _current
    cur = _current
    if cur is None:
        with _lock:
            if _current is None:
                _current = from_environment()
            cur = _current
    return cur


def set_active(t: Tuning | None) -> None:
    """Install ``t`` process-wide; ``None`` re-reads the environment on next use."""
    global _current
    with _lock:
        _current = t


@contextmanager
def using(t: Tuning) -> Iterator[Tuning]:
    """Temporarily install ``t`` (not safe against concurrent re-entry)."""
    global _current
    with _lock:
        prev, _current = _current, t
    try:
        yield t
    finally:
        with _lock:
            _current = prev
