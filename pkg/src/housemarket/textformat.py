"""Line-oriented instance files.

::

    n: 5
    axis: 1 2 3 4 5          # optional
    pref 1: 3 4 5 2 1        # most- to least-preferred
    ...
    endow: 1 2 3 4 5         # endow[i] = resource of agent i

``#`` starts a comment.  Every error names the offending line.
"""

from __future__ import annotations

import re
from pathlib import Path

from .market import DomainError, Instance

_PREF = re.compile(r"pref\s+(\d+)$")


class InstanceFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _ints(lineno: int, text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split())
    except ValueError:
        raise InstanceFormatError(lineno, f"expected integers, got {text.strip()!r}") from None


def _perm(lineno: int, values: tuple[int, ...], n: int, what: str) -> tuple[int, ...]:
    if sorted(values) != list(range(1, n + 1)):
        raise InstanceFormatError(lineno, f"{what} is not a permutation of 1..{n}: {list(values)}")
    return values


def parse_instance(text: str) -> Instance:
    n = None
    axis = endow = None
    prefs: dict[int, tuple[int, ...]] = {}
    axis_line = 0
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        last_line = lineno
        if ":" not in line:
            raise InstanceFormatError(lineno, f"expected 'key: values', got {line!r}")
        key, value = (part.strip() for part in line.split(":", 1))
        if key == "n":
            vals = _ints(lineno, value)
            if len(vals) != 1 or vals[0] < 1:
                raise InstanceFormatError(lineno, "n must be a positive integer")
            n = vals[0]
            continue
        if n is None:
            raise InstanceFormatError(lineno, "'n:' must come first")
        if key == "axis":
            axis, axis_line = _perm(lineno, _ints(lineno, value), n, "axis"), lineno
        elif key == "endow":
            endow = _perm(lineno, _ints(lineno, value), n, "endowment")
        elif m := _PREF.match(key):
            agent = int(m.group(1))
            if not 1 <= agent <= n or agent in prefs:
                raise InstanceFormatError(lineno, f"bad or repeated agent index {agent}")
            prefs[agent] = _perm(lineno, _ints(lineno, value), n, f"preference of agent {agent}")
        else:
            raise InstanceFormatError(lineno, f"unknown key {key!r}")
    if n is None:
        raise InstanceFormatError(last_line, "missing 'n:'")
    missing = [a for a in range(1, n + 1) if a not in prefs]
    if missing:
        raise InstanceFormatError(last_line, f"missing preferences for agents {missing}")
    if endow is None:
        raise InstanceFormatError(last_line, "missing 'endow:'")
    try:
        return Instance(tuple(prefs[a] for a in range(1, n + 1)), endow, axis)
    except DomainError as exc:
        raise InstanceFormatError(axis_line, str(exc)) from None


def format_instance(instance: Instance) -> str:
    out = [f"n: {instance.n}"]
    if instance.axis is not None:
        out.append("axis: " + " ".join(map(str, instance.axis)))
    for a, order in enumerate(instance.prefs, start=1):
        out.append(f"pref {a}: " + " ".join(map(str, order)))
    out.append("endow: " + " ".join(map(str, instance.endowment)))
    return "\n".join(out) + "\n"


def read_instance(path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(format_instance(instance), encoding="utf-8")
