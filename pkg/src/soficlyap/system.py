"""Constrained switched linear systems ``x(t+1) = A(w_t) x(t)``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InvalidInputError
from .shift import Alphabet, SoficShift, builtin_shift, reverse_shift, shift_from_spec


@dataclass(frozen=True, eq=False)
class SwitchedSystem:
    shift: SoficShift
    matrices: Mapping  # symbol -> (n, n) array

    def __post_init__(self):
        alphabet = self.shift.alphabet
        mats = {}
        dims = set()
        for sym in alphabet:
            if sym not in self.matrices:
                raise InvalidInputError(f"no matrix for symbol {sym!r}")
            a = np.array(self.matrices[sym], dtype=float)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise InvalidInputError(f"matrix for {sym!r} must be square, got shape {a.shape}")
            if not np.all(np.isfinite(a)):
                raise InvalidInputError(f"matrix for {sym!r} has non-finite entries")
            a.setflags(write=False)
            mats[sym] = a
            dims.add(a.shape[0])
        extra = set(self.matrices) - set(alphabet)
        if extra:
            raise InvalidInputError(f"matrices given for symbols outside the alphabet: {sorted(extra)}")
        if len(dims) != 1:
            raise InvalidInputError(f"matrices have mixed dimensions {sorted(dims)}")
        # Alphabet order, whatever the caller's insertion order was.
        object.__setattr__(self, "matrices", mats)

    @property
    def alphabet(self) -> Alphabet:
        return self.shift.alphabet

    @property
    def dimension(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    def __getitem__(self, symbol) -> np.ndarray:
        return self.matrices[symbol]

    def is_nonnegative(self) -> bool:
        return all(np.all(a >= 0) for a in self.matrices.values())

    def scaled(self, factor: float) -> "SwitchedSystem":
        return SwitchedSystem(self.shift, {s: a * factor for s, a in self.matrices.items()})

    def dual(self) -> "SwitchedSystem":
        """Transposed matrices driven by the time-reversed shift."""
        return SwitchedSystem(reverse_shift(self.shift), {s: a.T for s, a in self.matrices.items()})

    def to_spec(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "dimension": self.dimension,
            "matrices": {s: a.tolist() for s, a in self.matrices.items()},
        }


def system_from_spec(spec: Mapping) -> SwitchedSystem:
    """``{alphabet, dimension, matrices: {symbol: rows}, shift: <shift spec>}``.

    A missing ``shift`` means the full shift on the alphabet.
    """
    if "builtin" in spec:
        return builtin_system(spec["builtin"])
    try:
        alphabet = Alphabet(tuple(spec["alphabet"]))
        matrices = spec["matrices"]
    except KeyError as exc:
        raise InvalidInputError(f"system spec is missing {exc.args[0]!r}") from None
    shift_spec = spec.get("shift", {"alphabet": list(alphabet), "mode": "full"})
    shift = shift_from_spec(shift_spec)
    if tuple(shift.alphabet) != tuple(alphabet):
        raise InvalidInputError("system and shift alphabets differ")
    system = SwitchedSystem(shift, matrices)
    if "dimension" in spec and spec["dimension"] != system.dimension:
        raise InvalidInputError(f"declared dimension {spec['dimension']} != {system.dimension}")
    return system


def load_system(path) -> SwitchedSystem:
    if str(path) in BUILTIN_SYSTEMS:
        return builtin_system(str(path))
    with open(path, encoding="utf-8") as fh:
        return system_from_spec(json.load(fh))


POSITIVE_A = np.array([[0.2, 0.1, 0.0],
                       [0.6, 0.6, 0.5],
                       [0.6, 0.3, 0.2]])
POSITIVE_B = np.array([[0.1, 0.2, 0.3],
                       [0.2, 0.1, 0.5],
                       [0.1, 0.6, 0.7]])


def positive_golden_mean_system() -> SwitchedSystem:
    """Nonnegative 3x3 pair switching on the golden mean shift."""
    return SwitchedSystem(builtin_shift("golden-mean"), {"a": POSITIVE_A, "b": POSITIVE_B})


BUILTIN_SYSTEMS = {"positive-golden-mean": positive_golden_mean_system}


def builtin_system(name: str) -> SwitchedSystem:
    try:
        return BUILTIN_SYSTEMS[name]()
    except KeyError:
        raise InvalidInputError(f"unknown built-in system {name!r}") from None
