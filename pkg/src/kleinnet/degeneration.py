"""One-parameter families of representations pushed toward infinity.

The observable is the per-class translation-length vector, rescaled by its
sup-norm.  For the built-in stretched pair the rescaled vectors converge to
the projectivized cyclic word length, which is the translation length
function of an action on a tree; `tree_limit_check` measures the distance to
that oracle and the length-function axioms on the final sample.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import DegenerationError
from .sl2 import Matrix2C, Representation, classify, evaluate, make_rep
from .words import (
    ConjugacyClassList,
    Presentation,
    Word,
    canonical_cyclic,
    cyclically_reduce,
)

__all__ = [
    "LengthVector",
    "RepFamily",
    "TreeLimitReport",
    "length_vector",
    "projectivize",
    "sup_delta",
    "sweep",
    "cyclic_length_oracle",
    "tree_limit_check",
    "schottky_family",
    "laurent_family",
    "format_sweep_csv",
    "write_sweep_csv",
]

CAUCHY_TOL = 1e-2
AXIOM_TOL = 1e-3
ORACLE_TOL = 2e-2


@dataclass(frozen=True)
class LengthVector:
    """Translation lengths per conjugacy class, with the scale divided out.

    `scale` is 1 for raw vectors; after `projectivize` it holds the sup-norm
    of the raw values and the values have sup-norm 1.
    """

    classes: ConjugacyClassList
    values: tuple[float, ...]
    scale: float = 1.0

    def __post_init__(self) -> None:
        if len(self.values) != len(self.classes):
            raise DegenerationError("length vector does not match its class list")
        if any(v < 0.0 for v in self.values):
            raise DegenerationError("translation lengths are nonnegative")

    def sup(self) -> float:
        return max(self.values) if self.values else 0.0


def length_vector(rep: Representation, classes: ConjugacyClassList) -> LengthVector:
    if len(classes) == 0:
        raise DegenerationError("empty class list")
    values = tuple(
        classify(evaluate(rep, w)).translation_length for w in classes
    )
    return LengthVector(classes, values, 1.0)


def projectivize(v: LengthVector) -> LengthVector:
    top = v.sup()
    if top == 0.0:
        raise DegenerationError("fixed point: length function vanishes")
    if top == 1.0:
        return v
    return LengthVector(v.classes, tuple(x / top for x in v.values), v.scale * top)


def sup_delta(u: LengthVector, v: LengthVector) -> float:
    if u.classes.representatives != v.classes.representatives:
        raise DegenerationError("length vectors use different class lists")
    return max(abs(x - y) for x, y in zip(u.values, v.values))


@dataclass(frozen=True)
class RepFamily:
    """A rule t -> Representation for positive t, validated at each sample."""

    name: str
    presentation: Presentation
    builder: Callable[[float], Sequence[Matrix2C]]

    def build(self, t: float) -> Representation:
        if not t > 0.0:
            raise DegenerationError(f"family parameter must be positive, got {t}")
        return make_rep(self.presentation, list(self.builder(t)))


def schottky_family() -> RepFamily:
    """The built-in stretched pair: a diagonal stretch and its 45-degree
    rotation.  Ping-pong applies for large t, so the group is free and the
    limiting length function is exactly the cyclic word length."""

    def builder(t: float) -> list[Matrix2C]:
        a = Matrix2C.diagonal(math.exp(t), math.exp(-t))
        b = Matrix2C(math.cosh(t), math.sinh(t), math.sinh(t), math.cosh(t))
        return [a, b]

    return RepFamily("schottky", Presentation.free(2), builder)


LaurentEntry = Mapping[int, complex]


def laurent_family(
    name: str,
    entries: Sequence[Sequence[Sequence[LaurentEntry]]],
    presentation: Presentation | None = None,
) -> RepFamily:
    """Family with matrix entries given as Laurent polynomials in e^t.

    `entries[g][i][j]` maps integer powers k to coefficients c, meaning the
    (i,j) entry of generator g is sum c * e^(k t).
    """
    gens = []
    for g, rows in enumerate(entries):
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise DegenerationError(f"generator {g + 1}: expected a 2x2 entry table")
        gens.append(tuple(tuple(dict(cell) for cell in row) for row in rows))
    if not gens:
        raise DegenerationError("family needs at least one generator")
    pres = presentation if presentation is not None else Presentation.free(len(gens))
    if pres.n_generators != len(gens):
        raise DegenerationError("entry table does not match the presentation rank")

    def builder(t: float) -> list[Matrix2C]:
        mats = []
        for rows in gens:
            cells = [
                sum((c * math.exp(k * t) for k, c in cell.items()), 0j)
                for row in rows
                for cell in row
            ]
            mats.append(Matrix2C(*cells))
        return mats

    return RepFamily(name, pres, builder)


def _n_threads() -> int:
    raw = os.environ.get("KLEINNET_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def sweep(
    family: RepFamily,
    classes: ConjugacyClassList,
    t_values: Sequence[float],
) -> list[LengthVector]:
    """Projectivized length vector at each t.  Samples are independent; with
    KLEINNET_THREADS > 1 they are evaluated concurrently, and the output
    order always matches t_values."""
    ts = list(t_values)
    if len(ts) < 2:
        raise DegenerationError("sweep needs at least two parameter values")
    if any(not b > a for a, b in zip(ts, ts[1:])):
        raise DegenerationError("sweep parameter values must increase")

    def sample(t: float) -> LengthVector:
        return projectivize(length_vector(family.build(t), classes))

    n = _n_threads()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(sample, ts))
    return [sample(t) for t in ts]


def cyclic_length_oracle(classes: ConjugacyClassList) -> LengthVector:
    """Projectivized cyclically-reduced word length: the translation length
    function of the free action on the Cayley tree."""
    lengths = [float(len(cyclically_reduce(w))) for w in classes]
    raw = LengthVector(classes, tuple(lengths), 1.0)
    return projectivize(raw)


def _class_index(classes: ConjugacyClassList) -> dict[tuple[int, ...], int]:
    return {w.letters: i for i, w in enumerate(classes)}


@dataclass(frozen=True)
class TreeLimitReport:
    """Convergence evidence for one sweep: Cauchy deltas, distance of the
    final vector to the cyclic-length oracle, and the two length-function
    axioms checked on the final vector."""

    deltas: tuple[float, ...]
    converged: bool
    oracle_distance: float
    oracle_ok: bool
    symmetry_residual: float
    symmetry_ok: bool
    homogeneity_residual: float
    homogeneity_ok: bool

    @property
    def passed(self) -> bool:
        return (
            self.converged and self.oracle_ok and self.symmetry_ok
            and self.homogeneity_ok
        )

    def to_json(self) -> str:
        payload = {
            "deltas": list(self.deltas),
            "converged": self.converged,
            "oracle_distance": self.oracle_distance,
            "oracle_ok": self.oracle_ok,
            "symmetry_residual": self.symmetry_residual,
            "symmetry_ok": self.symmetry_ok,
            "homogeneity_residual": self.homogeneity_residual,
            "homogeneity_ok": self.homogeneity_ok,
            "passed": self.passed,
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def _axiom_residuals(final: LengthVector) -> tuple[float, float]:
    classes = final.classes
    index = _class_index(classes)
    sym = 0.0
    hom = 0.0
    for i, w in enumerate(classes):
        letters = w.letters
        if not letters:
            continue
        inv = canonical_cyclic(Word(letters).inverse())
        j = index.get(inv.letters)
        if j is not None:
            sym = max(sym, abs(final.values[i] - final.values[j]))
        n = 2
        while n * len(letters) <= classes.max_length:
            power = canonical_cyclic(Word(letters * n))
            j = index.get(power.letters)
            if j is not None:
                hom = max(hom, abs(final.values[j] - n * final.values[i]))
            n += 1
    return sym, hom


def tree_limit_check(
    vectors: Sequence[LengthVector],
    classes: ConjugacyClassList,
    cauchy_tol: float = CAUCHY_TOL,
    oracle_tol: float = ORACLE_TOL,
    axiom_tol: float = AXIOM_TOL,
) -> TreeLimitReport:
    if len(vectors) < 2:
        raise DegenerationError("need at least two vectors to check convergence")
    deltas = tuple(
        sup_delta(u, v) for u, v in zip(vectors, vectors[1:])
    )
    final = vectors[-1]
    oracle = cyclic_length_oracle(classes)
    distance = sup_delta(final, oracle)
    sym, hom = _axiom_residuals(final)
    return TreeLimitReport(
        deltas=deltas,
        converged=deltas[-1] < cauchy_tol,
        oracle_distance=distance,
        oracle_ok=distance < oracle_tol,
        symmetry_residual=sym,
        symmetry_ok=sym <= axiom_tol,
        homogeneity_residual=hom,
        homogeneity_ok=hom <= axiom_tol,
    )


def format_sweep_csv(
    t_values: Sequence[float], vectors: Sequence[LengthVector]
) -> str:
    if len(t_values) != len(vectors):
        raise DegenerationError("one vector per parameter value required")
    if not vectors:
        raise DegenerationError("empty sweep")
    words = vectors[0].classes.words_text()
    lines = ["t,lambda," + ",".join(words)]
    for t, vec in zip(t_values, vectors):
        cells = [f"{t:.9g}", f"{vec.scale:.9g}"]
        cells.extend(f"{x:.9g}" for x in vec.values)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_sweep_csv(path, t_values, vectors) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_sweep_csv(t_values, vectors))
