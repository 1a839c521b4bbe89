"""SL(2,C) matrices, representations of free-ish groups, characters, and
isometry classification for the hyperbolic 3-space action.

Unimodularity is checked with a tolerance that scales with the squared entry
magnitude: the float determinant of a matrix with entries of size s carries
O(s^2) ulp noise, so an absolute gate would reject exactly unimodular
matrices that are merely large (stretched families hit this by t ~ 20).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotUnimodularError, RepresentationError
from .words import ConjugacyClassList, Presentation, Word

__all__ = [
    "Matrix2C",
    "Representation",
    "IsometryClass",
    "ModuliPoint",
    "make_rep",
    "evaluate",
    "character",
    "classify",
    "translation_length_arccosh",
    "morgan_shalen_vector",
    "moduli_point",
    "conjugate_rep",
    "random_sl2",
    "random_loxodromic",
    "parse_rep_text",
    "format_rep_text",
    "load_rep",
    "save_rep",
]

UNIMODULAR_TOL = 1e-9
RELATION_TOL = 1e-6
CLASSIFY_TOL = 1e-9


@dataclass(frozen=True)
class Matrix2C:
    """A 2x2 complex matrix, row-major entries a b / c d."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def identity(cls) -> "Matrix2C":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diagonal(cls, x: complex, y: complex) -> "Matrix2C":
        return cls(complex(x), 0.0, 0.0, complex(y))

    @property
    def trace(self) -> complex:
        return self.a + self.d

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def __matmul__(self, other: "Matrix2C") -> "Matrix2C":
        if not isinstance(other, Matrix2C):
            return NotImplemented
        return Matrix2C(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Matrix2C":
        """Inverse assuming det = 1 (the adjugate)."""
        return Matrix2C(self.d, -self.b, -self.c, self.a)

    def entries(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.a), complex(self.b), complex(self.c), complex(self.d))

    def max_abs_diff(self, other: "Matrix2C") -> float:
        return max(
            abs(self.a - other.a),
            abs(self.b - other.b),
            abs(self.c - other.c),
            abs(self.d - other.d),
        )

    def apply(self, z: complex) -> complex:
        """Möbius action on a finite point with a finite image."""
        return (self.a * z + self.b) / (self.c * z + self.d)


def check_unimodular(m: Matrix2C, tol: float = UNIMODULAR_TOL) -> None:
    s = m.scale()
    bound = tol * max(1.0, s * s)
    if not abs(m.det - 1.0) <= bound:
        raise NotUnimodularError(
            f"not unimodular: det = {m.det:.6g} (tolerance {bound:.3g})"
        )


def _dist_to_plus_minus_identity(m: Matrix2C) -> float:
    ident = Matrix2C.identity()
    neg = Matrix2C(-1.0, 0.0, 0.0, -1.0)
    return min(m.max_abs_diff(ident), m.max_abs_diff(neg))


@dataclass(frozen=True)
class Representation:
    """Generator images (unimodular, precomputed inverses) plus the residuals
    of the presentation's relations.  A relation residual beyond RELATION_TOL
    flags the representation (`relations_ok` False) but does not reject it."""

    presentation: Presentation
    images: tuple[Matrix2C, ...]
    inverses: tuple[Matrix2C, ...]
    relation_residuals: tuple[float, ...]

    @property
    def rank(self) -> int:
        return self.presentation.n_generators

    @property
    def relations_ok(self) -> bool:
        return all(r <= RELATION_TOL for r in self.relation_residuals)


def make_rep(
    presentation: Presentation,
    matrices: Sequence[Matrix2C],
    det_tol: float = UNIMODULAR_TOL,
) -> Representation:
    if len(matrices) != presentation.n_generators:
        raise RepresentationError(
            f"presentation has {presentation.n_generators} generators, "
            f"got {len(matrices)} matrices"
        )
    for i, m in enumerate(matrices):
        try:
            check_unimodular(m, det_tol)
        except NotUnimodularError as exc:
            raise NotUnimodularError(f"generator {i + 1}: {exc}") from None
    images = tuple(matrices)
    inverses = tuple(m.inverse() for m in matrices)
    rep = Representation(presentation, images, inverses, ())
    residuals = tuple(
        _dist_to_plus_minus_identity(evaluate(rep, rel))
        for rel in presentation.relations
    )
    return Representation(presentation, images, inverses, residuals)


def evaluate(rep: Representation, word: Word) -> Matrix2C:
    m = Matrix2C.identity()
    for letter in word.letters:
        k = abs(letter)
        if k > rep.rank:
            raise RepresentationError(
                f"word {word.text()!r} uses generator {k} beyond rank {rep.rank}"
            )
        m = m @ (rep.images[k - 1] if letter > 0 else rep.inverses[k - 1])
    return m


def character(rep: Representation, word: Word) -> complex:
    """The trace of the word's image (a conjugation invariant)."""
    return evaluate(rep, word).trace


@dataclass(frozen=True)
class IsometryClass:
    """Isometry type of the hyperbolic 3-space action, with the translation
    length along the axis (zero unless loxodromic)."""

    kind: str  # "identity" | "parabolic" | "elliptic" | "loxodromic"
    translation_length: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "parabolic", "elliptic", "loxodromic"):
            raise RepresentationError(f"unknown isometry kind {self.kind!r}")
        if self.kind != "loxodromic" and self.translation_length != 0.0:
            raise RepresentationError("only loxodromics translate")


def _length_from_trace(tr: complex) -> float:
    """2*ln|mu| for the eigenvalue mu of larger modulus, det = 1."""
    w = tr / 2.0
    if abs(w) > 1e8:
        # mu = w(1 + sqrt(1 - 1/w^2)) ~ 2w; the correction is below 1 ulp
        return 2.0 * (math.log(abs(w)) + math.log(2.0))
    s = cmath.sqrt(w * w - 1.0)
    mu = w + s
    if abs(mu) < 1.0:
        mu = w - s
    return abs(2.0 * math.log(abs(mu)))


def translation_length_arccosh(m: Matrix2C) -> float:
    """Cross-check formula: 2*|Re arccosh(tr/2)|."""
    return 2.0 * abs(cmath.acosh(m.trace / 2.0).real)


def classify(m: Matrix2C, tol: float = CLASSIFY_TOL) -> IsometryClass:
    """Classify a unimodular matrix by trace; loxodromic length is 2*ln|mu|
    with the arccosh form asserted to agree."""
    check_unimodular(m)
    if _dist_to_plus_minus_identity(m) <= tol:
        return IsometryClass("identity")
    tr = m.trace
    if abs(tr.imag) <= tol:
        x = tr.real
        if abs(abs(x) - 2.0) <= tol:
            return IsometryClass("parabolic")
        if -2.0 < x < 2.0:
            return IsometryClass("elliptic")
    length = _length_from_trace(tr)
    cross = translation_length_arccosh(m)
    if not math.isclose(length, cross, rel_tol=1e-6, abs_tol=1e-9):
        raise RepresentationError(
            f"translation length formulas disagree: {length!r} vs {cross!r}"
        )
    return IsometryClass("loxodromic", length)


def morgan_shalen_vector(
    rep: Representation, classes: ConjugacyClassList | Iterable[Word]
) -> list[float]:
    """log(|character| + 2) per class: the coordinates whose projectivization
    compactifies the character variety."""
    return [math.log(abs(character(rep, w)) + 2.0) for w in classes]


@dataclass(frozen=True)
class ModuliPoint:
    """Trace coordinates of a representation: the characters of a fixed tuple
    of coordinate words (for rank 2: a, b, ab, which determine the character)."""

    words: tuple[Word, ...]
    traces: tuple[complex, ...]

    def agrees(self, other: "ModuliPoint", tol: float = 1e-8) -> bool:
        if self.words != other.words:
            return False
        return all(abs(x - y) <= tol for x, y in zip(self.traces, other.traces))


_RANK2_COORDS = (Word((1,)), Word((2,)), Word((1, 2)))


def moduli_point(
    rep: Representation, coordinate_words: Sequence[Word] | None = None
) -> ModuliPoint:
    if coordinate_words is None:
        if rep.rank != 2:
            raise RepresentationError(
                "default trace coordinates exist only for rank 2; "
                "pass coordinate_words"
            )
        coordinate_words = _RANK2_COORDS
    words = tuple(coordinate_words)
    return ModuliPoint(words, tuple(character(rep, w) for w in words))


def conjugate_rep(rep: Representation, g: Matrix2C) -> Representation:
    check_unimodular(g)
    gi = g.inverse()
    return make_rep(rep.presentation, [g @ m @ gi for m in rep.images])


def random_sl2(rng, spread: float = 1.0) -> Matrix2C:
    """Random unimodular matrix: draw a, b, c (|a| bounded away from 0) and
    solve for d, so det = 1 to machine precision."""

    def draw() -> complex:
        return complex(rng.normal(0.0, spread), rng.normal(0.0, spread))

    a = draw()
    while abs(a) < 0.3:
        a = draw()
    b, c = draw(), draw()
    d = (1.0 + b * c) / a
    return Matrix2C(a, b, c, d)


def random_loxodromic(rng, spread: float = 1.0) -> Matrix2C:
    """Conjugate of diag(mu, 1/mu) with |mu| in [e^0.2, e^1.5]: loxodromic
    with translation length in [0.4, 3.0]."""
    u = rng.uniform(0.2, 1.5)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    mu = cmath.exp(complex(u, theta))
    g = random_sl2(rng, spread)
    return g @ Matrix2C.diagonal(mu, 1.0 / mu) @ g.inverse()


# -- representation files ----------------------------------------------------
#
# One line per generator letter, four complex entries as re,im pairs:
#
#     a 1.0,0.0 0.0,0.0 0.0,0.0 1.0,0.0
#
# Floats are written with repr() so a parse/format cycle is byte-stable.


def parse_rep_text(text: str) -> list[Matrix2C]:
    found: dict[int, Matrix2C] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5 or len(parts[0]) != 1 or not "a" <= parts[0] <= "z":
            raise RepresentationError(
                f"line {lineno}: expected '<letter> re,im re,im re,im re,im'"
            )
        index = ord(parts[0]) - ord("a") + 1
        if index in found:
            raise RepresentationError(f"line {lineno}: duplicate generator {parts[0]!r}")
        entries = []
        for token in parts[1:]:
            pieces = token.split(",")
            if len(pieces) != 2:
                raise RepresentationError(f"line {lineno}: bad entry {token!r}")
            try:
                entries.append(complex(float(pieces[0]), float(pieces[1])))
            except ValueError as exc:
                raise RepresentationError(f"line {lineno}: {exc}") from exc
        found[index] = Matrix2C(*entries)
    if not found:
        raise RepresentationError("rep file defines no generators")
    rank = max(found)
    missing = [chr(ord("a") + i) for i in range(rank) if i + 1 not in found]
    if missing:
        raise RepresentationError(f"rep file skips generator(s) {', '.join(missing)}")
    return [found[i + 1] for i in range(rank)]


def format_rep_text(matrices: Sequence[Matrix2C]) -> str:
    lines = []
    for i, m in enumerate(matrices):
        letter = chr(ord("a") + i)
        cells = " ".join(f"{e.real!r},{e.imag!r}" for e in m.entries())
        lines.append(f"{letter} {cells}")
    return "\n".join(lines) + "\n"


def load_rep(path) -> list[Matrix2C]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rep_text(fh.read())


def save_rep(path, matrices: Sequence[Matrix2C]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_rep_text(matrices))
