"""Rewrite the frozen CLI outputs next to this file: ``python3 tests/golden/regenerate.py``."""
from __future__ import annotations

import pathlib

from superpoint.cli import run

HERE = pathlib.Path(__file__).resolve().parent
INPUTS = ("diag", "fat_point", "odd_pair", "soul_scalar")
COMMANDS = ("decompose", "spectral")
FORMATS = ("text", "json")


def golden_path(name: str, command: str, fmt: str) -> pathlib.Path:
    return HERE / f"{name}.{command}.{fmt}.out"


def main() -> None:
    for name in INPUTS:
        for command in COMMANDS:
            for fmt in FORMATS:
                code, out, err = run([command, str(HERE / f"{name}.json"), "--format", fmt, "--backend", "exact"])
                if code:
                    raise SystemExit(f"{name} {command}: exit {code}: {err}")
                golden_path(name, command, fmt).write_text(out, encoding="utf-8")


if __name__ == "__main__":
    main()
