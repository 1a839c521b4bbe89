"""Free-group word algebra: reduction, cyclic canonical forms, conjugacy classes.

A word is a tuple of nonzero signed integers: +k is generator k, -k its
inverse (1-based).  Text syntax uses lowercase letters a-z for generators
1-26 and the matching uppercase letter for the inverse, so "abAB" is the
commutator of the first two generators; "1" (or the empty string) is the
identity.  Letter order for all lexicographic comparisons is
a < a^-1 < b < b^-1 < ...
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import WordError

__all__ = [
    "Word",
    "Presentation",
    "ConjugacyClassList",
    "reduce_word",
    "cyclically_reduce",
    "canonical_cyclic",
    "enumerate_classes",
    "random_word",
]


def _check_letter(letter: int, rank: int | None = None) -> None:
    if not isinstance(letter, int) or isinstance(letter, bool) or letter == 0:
        raise WordError(f"letter {letter!r} is not a nonzero integer")
    if rank is not None and abs(letter) > rank:
        raise WordError(f"generator index {abs(letter)} out of range for rank {rank}")


def _letter_key(letter: int) -> tuple[int, int]:
    return (abs(letter), 0 if letter > 0 else 1)


def _reduce(letters: Iterable[int], rank: int | None = None) -> tuple[int, ...]:
    out: list[int] = []
    for letter in letters:
        _check_letter(letter, rank)
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


@dataclass(frozen=True, order=False)
class Word:
    """A freely reduced word.  Construct via `reduce_word` or `Word.from_text`;
    the constructor rejects unreduced letter sequences."""

    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for i, letter in enumerate(self.letters):
            _check_letter(letter)
            if i and self.letters[i - 1] == -letter:
                raise WordError(
                    f"letters {self.letters!r} are not freely reduced at position {i}"
                )

    @classmethod
    def from_text(cls, text: str) -> "Word":
        text = text.strip()
        if text in ("", "1"):
            return cls(())
        letters = []
        for ch in text:
            if "a" <= ch <= "z":
                letters.append(ord(ch) - ord("a") + 1)
            elif "A" <= ch <= "Z":
                letters.append(-(ord(ch) - ord("A") + 1))
            else:
                raise WordError(f"bad character {ch!r} in word text {text!r}")
        return cls(_reduce(letters))

    def text(self) -> str:
        if not self.letters:
            return "1"
        chars = []
        for letter in self.letters:
            base = "a" if letter > 0 else "A"
            index = abs(letter) - 1
            if index >= 26:
                raise WordError("word text syntax only covers 26 generators")
            chars.append(chr(ord(base) + index))
        return "".join(chars)

    def __str__(self) -> str:
        return self.text()

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(_reduce(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(tuple(-l for l in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word(())
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def max_index(self) -> int:
        return max((abs(l) for l in self.letters), default=0)

    def shortlex_key(self) -> tuple:
        return (len(self.letters), tuple(_letter_key(l) for l in self.letters))


def reduce_word(letters: Sequence[int], rank: int | None = None) -> Word:
    """Freely reduce a letter sequence; validates indices against `rank` if given."""
    return Word(_reduce(letters, rank))


def cyclically_reduce(word: Word) -> Word:
    ls = list(word.letters)
    while len(ls) >= 2 and ls[0] == -ls[-1]:
        ls = ls[1:-1]
    return Word(tuple(ls))


def canonical_cyclic(word: Word) -> Word:
    """Canonical conjugacy-class representative: cyclically reduce, then take
    the lexicographically least rotation."""
    core = cyclically_reduce(word).letters
    if len(core) <= 1:
        return Word(core)
    rotations = (core[i:] + core[:i] for i in range(len(core)))
    best = min(rotations, key=lambda r: tuple(_letter_key(l) for l in r))
    return Word(best)


@dataclass(frozen=True)
class Presentation:
    """A finite presentation; relations empty means a free group."""

    n_generators: int
    relations: tuple[Word, ...] = ()

    def __post_init__(self) -> None:
        if self.n_generators < 1:
            raise WordError("a presentation needs at least one generator")
        for rel in self.relations:
            if not rel:
                raise WordError("empty relation")
            if rel.max_index() > self.n_generators:
                raise WordError(
                    f"relation {rel.text()!r} uses a generator beyond rank "
                    f"{self.n_generators}"
                )

    @classmethod
    def free(cls, rank: int) -> "Presentation":
        return cls(rank, ())


@dataclass(frozen=True)
class ConjugacyClassList:
    """Canonical representatives of the nontrivial conjugacy classes with
    cyclic length <= max_length, in shortlex order."""

    representatives: tuple[Word, ...]
    max_length: int
    rank: int
    folded: bool = False

    def __len__(self) -> int:
        return len(self.representatives)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.representatives)

    def __getitem__(self, i: int) -> Word:
        return self.representatives[i]

    def words_text(self) -> list[str]:
        return [w.text() for w in self.representatives]


def enumerate_classes(
    rank: int, max_length: int = 4, fold_inverses: bool = False
) -> ConjugacyClassList:
    """Enumerate conjugacy classes of the free group of the given rank up to
    cyclic word length max_length.

    `fold_inverses` merges each class with its inverse class, keeping the
    smaller representative.  Cost grows like (2*rank-1)**max_length.
    """
    if rank < 1:
        raise WordError("rank must be >= 1")
    if max_length < 1:
        raise WordError("max_length must be >= 1: an empty class list is useless")
    alphabet = [l for k in range(1, rank + 1) for l in (k, -k)]
    found: set[tuple[int, ...]] = set()

    def visit(prefix: list[int]) -> None:
        for letter in alphabet:
            if prefix and letter == -prefix[-1]:
                continue
            prefix.append(letter)
            if len(prefix) == 1 or prefix[0] != -prefix[-1]:
                rep = canonical_cyclic(Word(tuple(prefix)))
                if fold_inverses:
                    other = canonical_cyclic(rep.inverse())
                    if other.shortlex_key() < rep.shortlex_key():
                        rep = other
                found.add(rep.letters)
            if len(prefix) < max_length:
                visit(prefix)
            prefix.pop()

    visit([])
    reps = sorted((Word(ls) for ls in found), key=Word.shortlex_key)
    return ConjugacyClassList(tuple(reps), max_length, rank, fold_inverses)


def random_word(rng, rank: int, length: int) -> Word:
    """A uniformly random freely reduced word of exactly `length` letters
    (nonbacktracking walk on the generator alphabet)."""
    if rank < 1 or length < 0:
        raise WordError("rank must be >= 1 and length >= 0")
    alphabet = [l for k in range(1, rank + 1) for l in (k, -k)]
    letters: list[int] = []
    for _ in range(length):
        choices = [l for l in alphabet if not letters or l != -letters[-1]]
        letters.append(choices[int(rng.integers(len(choices)))])
    return Word(tuple(letters))
