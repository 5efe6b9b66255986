"""Turn a dataclass of defaults into command-line flags."""

from __future__ import annotations

import argparse
import dataclasses
from typing import TypeVar

C = TypeVar("C")


def parse_config(cls: type[C], description: str) -> C:
    parser = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        kind = type(f.default)
        if kind is tuple:
            parser.add_argument(flag, type=type(f.default[0]), nargs="+", default=f.default)
        else:
            parser.add_argument(flag, type=kind, default=f.default)
    values = vars(parser.parse_args())
    return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in values.items()})
