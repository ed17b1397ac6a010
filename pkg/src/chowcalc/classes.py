"""Cycle classes on the two factors: the curve C and the surface S.

A class is a finite rational combination of *basis labels*.  Labels carry
their own codimension through a prefix:

=========  =====  ==================================================
space      codim  labels
=========  =====  ==================================================
curve      0      ``"C"`` (fundamental class)
curve      1      ``"pt"`` (reference point o_C), ``"pic:<name>"``
surface    0      ``"S"``
surface    1      ``"ns:<name>"``, ``"pic:<name>"``
surface    2      ``"pt"`` (reference point o_S), ``"alb:<name>"``
=========  =====  ==================================================

So a divisor on C is ``deg * pt + (Pic^0 part)`` and a zero-cycle on S is
``deg * pt + (Albanese part)``.  Homologically trivial classes are exactly
the ones whose ``pt`` and ``ns:`` coefficients vanish.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .linalg import Q, fmt


class GradingError(ValueError):
    """A class was used at the wrong codimension."""


CURVE = "C"
SURFACE = "S"
POINT = "pt"


def label_codim(space: str, label: str) -> int:
    if space == CURVE:
        if label == "C":
            return 0
        if label == POINT or label.startswith("pic:"):
            return 1
    elif space == SURFACE:
        if label == "S":
            return 0
        if label.startswith(("ns:", "pic:")):
            return 1
        if label == POINT or label.startswith("alb:"):
            return 2
    raise GradingError(f"unknown {space}-label {label!r}")


def is_trivial_label(label: str) -> bool:
    """Labels whose cohomology class is zero (Pic^0 / Albanese directions)."""
    return label.startswith(("pic:", "alb:"))


def _normalise(items: Iterable[tuple[str, Fraction]]) -> tuple[tuple[str, Fraction], ...]:
    acc: dict[str, Fraction] = {}
    for label, c in items:
        acc[label] = acc.get(label, Fraction(0)) + c
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


@dataclass(frozen=True)
class FactorClass:
    space: str
    codim: int
    terms: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        top = 1 if self.space == CURVE else 2
        if not 0 <= self.codim <= top:
            raise GradingError(f"codim {self.codim} out of range on {self.space}")
        for label, _ in self.terms:
            if label_codim(self.space, label) != self.codim:
                raise GradingError(f"label {label!r} is not codim {self.codim}")

    @classmethod
    def of(cls, space: str, codim: int, coeffs: Mapping[str, object] | Iterable = ()) -> "FactorClass":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        return cls(space, codim, _normalise((k, Q(v)) for k, v in items))

    @classmethod
    def zero(cls, space: str, codim: int) -> "FactorClass":
        return cls(space, codim, ())

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.terms)

    def coeff(self, label: str) -> Fraction:
        return self.as_dict().get(label, Fraction(0))

    @property
    def degree(self) -> Fraction:
        top = 1 if self.space == CURVE else 2
        if self.codim != top:
            raise GradingError(f"degree needs a top-codimension class, got codim {self.codim}")
        return self.coeff(POINT)

    def trivial_part(self) -> dict[str, Fraction]:
        """The Pic^0 / Albanese coordinates, keyed by bare generator name."""
        return {k.split(":", 1)[1]: v for k, v in self.terms if is_trivial_label(k)}

    def ns_part(self) -> dict[str, Fraction]:
        return {k[3:]: v for k, v in self.terms if k.startswith("ns:")}

    def is_zero(self) -> bool:
        return not self.terms

    def is_homologically_trivial(self) -> bool:
        return all(is_trivial_label(k) for k, _ in self.terms)

    def _check(self, other: "FactorClass"):
        if not isinstance(other, FactorClass):
            return NotImplemented
        if (self.space, self.codim) != (other.space, other.codim):
            raise GradingError(
                f"cannot add {self.space}^{self.codim} and {other.space}^{other.codim}"
            )
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FactorClass(self.space, self.codim, _normalise(self.terms + other.terms))

    def __neg__(self):
        return FactorClass(self.space, self.codim, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, FactorClass):
            return NotImplemented
        s = Q(scalar)
        return FactorClass(self.space, self.codim, _normalise((k, v * s) for k, v in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Q(scalar))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for label, c in self.terms:
            name = f"[{self.space}]" if label in ("C", "S") else label
            parts.append(name if c == 1 else f"{fmt(c)}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


def CurveClass(codim: int, coeffs=()) -> FactorClass:
    return FactorClass.of(CURVE, codim, coeffs)


def SurfaceClass(codim: int, coeffs=()) -> FactorClass:
    return FactorClass.of(SURFACE, codim, coeffs)


def curve_fundamental(c=1) -> FactorClass:
    return CurveClass(0, {"C": c})


def surface_fundamental(c=1) -> FactorClass:
    return SurfaceClass(0, {"S": c})


def curve_divisor(degree=0, pic0: Mapping[str, object] | None = None) -> FactorClass:
    """``degree * o_C + sum pic0[name] * pic:name``."""
    coeffs = {POINT: degree}
    coeffs.update({f"pic:{k}": v for k, v in (pic0 or {}).items()})
    return CurveClass(1, coeffs)


def surface_divisor(ns: Mapping[str, object] | None = None,
                    pic0: Mapping[str, object] | None = None) -> FactorClass:
    coeffs = {f"ns:{k}": v for k, v in (ns or {}).items()}
    coeffs.update({f"pic:{k}": v for k, v in (pic0 or {}).items()})
    return SurfaceClass(1, coeffs)


def surface_point(degree=0, alb: Mapping[str, object] | None = None) -> FactorClass:
    coeffs = {POINT: degree}
    coeffs.update({f"alb:{k}": v for k, v in (alb or {}).items()})
    return SurfaceClass(2, coeffs)


@functools.lru_cache(maxsize=4096)
def basis_class(space: str, label: str, coeff=1) -> FactorClass:
    return FactorClass.of(space, label_codim(space, label), {label: coeff})
