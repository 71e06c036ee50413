"""Irreducible characters of the free reflection quantum groups.

Characters are labelled by reduced words in the monoid ``<a, z | z^s = 1>``.
Products are expanded with the recursive fusion rule

    chi(v a z^i) * chi(z^j a w) = chi(v a z^{i+j} a w)                 if i + j != 0 mod s
                                = chi(v a^2 w) + chi(v) * chi(w)         otherwise

The recursion passes through words outside the submonoid ``M`` generated by
``a z^r a``, so the ambient monoid is used as the index set.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Iterator, Sequence

Block = tuple[str, int]


def _is_square(s: int) -> bool:
    r = math.isqrt(s)
    return r * r == s


@dataclass(frozen=True)
class Surd:
    """Exact number ``rational + root * sqrt(s)`` with rational parts."""

    rational: Fraction
    root: Fraction
    s: int

    def __post_init__(self):
        object.__setattr__(self, "rational", Fraction(self.rational))
        object.__setattr__(self, "root", Fraction(self.root))
        # sqrt(s) is rational when s is a perfect square; fold it so equality is structural
        if self.root and _is_square(self.s):
            object.__setattr__(self, "rational", self.rational + self.root * math.isqrt(self.s))
            object.__setattr__(self, "root", Fraction(0))

    @classmethod
    def sqrt_s_power(cls, s: int, k: int) -> "Surd":
        """``s^(k/2)`` for any integer ``k``."""
        half, odd = divmod(k, 2)
        base = Fraction(s) ** half
        return cls(0, base, s) if odd else cls(base, 0, s)

    def _coerce(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.s != self.s:
                raise ValueError(f"cannot combine surds over sqrt({self.s}) and sqrt({other.s})")
            return other
        if isinstance(other, Rational):
            return Surd(Fraction(other), 0, self.s)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Surd(self.rational + other.rational, self.root + other.root, self.s)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.rational, -self.root, self.s)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.rational, self.root, other.rational, other.root
        return Surd(a * c + b * d * self.s, a * d + b * c, self.s)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.rational == other.rational and self.root == other.root

    def __hash__(self):
        return hash((self.rational, self.root, self.s))

    def __bool__(self):
        return bool(self.rational) or bool(self.root)

    def __float__(self):
        return float(self.rational) + float(self.root) * math.sqrt(self.s)

    def __str__(self):
        if not self.root:
            return str(self.rational)
        root = f"sqrt({self.s})" if self.root == 1 else f"{self.root}*sqrt({self.s})"
        if not self.rational:
            return root
        return f"({self.rational} + {root})"

    __repr__ = __str__


class WordParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


def reduce_blocks(raw: Iterable[Block], s: int) -> tuple[Block, ...]:
    """Normal form of an alternating block list in ``<a, z | z^s = 1>``.

    Merges adjacent blocks of the same letter, reduces z-exponents mod ``s``
    and drops z-blocks that become trivial, until nothing changes.
    """
    if s < 1:
        raise ValueError(f"s must be a positive integer, got {s}")
    out: list[list] = []
    for letter, exp in raw:
        if letter not in ("a", "z"):
            raise ValueError(f"unknown generator {letter!r}")
        exp = int(exp)
        if letter == "a" and exp <= 0:
            raise ValueError(f"a-exponents must be positive, got {exp}")
        if letter == "z":
            exp %= s
            if exp == 0:
                continue
        if out and out[-1][0] == letter:
            out[-1][1] += exp
            if letter == "z":
                out[-1][1] %= s
                if out[-1][1] == 0:
                    out.pop()
        else:
            out.append([letter, exp])
    # popping a trivial z-block can leave two a-blocks adjacent
    merged: list[list] = []
    for letter, exp in out:
        if merged and merged[-1][0] == letter:
            merged[-1][1] += exp
        else:
            merged.append([letter, exp])
    return tuple((letter, exp) for letter, exp in merged)


@dataclass(frozen=True)
class Word:
    """Reduced word labelling the character ``chi_w``."""

    s: int
    blocks: tuple[Block, ...] = ()

    @classmethod
    def from_blocks(cls, raw: Iterable[Block], s: int) -> "Word":
        return cls(s, reduce_blocks(raw, s))

    @classmethod
    def parse(cls, text: str, s: int) -> "Word":
        return parse_word(text, s)

    def __len__(self):
        return len(self.blocks)

    def __str__(self):
        if not self.blocks:
            return "e"
        parts = []
        for letter, exp in self.blocks:
            parts.append("a" if letter == "a" and exp == 1 else f"{letter}^{exp}")
        return ".".join(parts)

    def __repr__(self):
        return f"Word({self}, s={self.s})"

    def sort_key(self):
        return (len(self.blocks), self.blocks)

    def __mul__(self, other: "Word") -> "Word":
        """Concatenation in the monoid (not the fusion product)."""
        _check_same_s(self, other)
        return Word.from_blocks(self.blocks + other.blocks, self.s)

    def star(self) -> "Word":
        """Involution: reverse the word, ``a* = a`` and ``z* = z^-1``."""
        return Word.from_blocks(
            ((letter, -exp if letter == "z" else exp) for letter, exp in reversed(self.blocks)),
            self.s,
        )

    @property
    def a_exponents(self) -> tuple[int, ...]:
        return tuple(exp for letter, exp in self.blocks if letter == "a")

    @property
    def in_M(self) -> bool:
        """Membership in the submonoid generated by the words ``a z^r a``."""
        if not self.blocks:
            return True
        if self.blocks[0][0] != "a" or self.blocks[-1][0] != "a":
            return False
        ell = self.a_exponents
        if len(ell) == 1:
            return ell[0] % 2 == 0
        return ell[0] % 2 == 1 and ell[-1] % 2 == 1 and all(x % 2 == 0 for x in ell[1:-1])


def _check_same_s(w1: Word, w2: Word) -> None:
    if w1.s != w2.s:
        raise ValueError(f"words over different monoids: s={w1.s} and s={w2.s}")


_TOKEN = re.compile(r"(a)(?:\^(-?\d+))?|(z)\^(-?\d+)")


def parse_word(text: str, s: int) -> Word:
    """Parse ``word := 'e' | block ('.' block)*`` with ``block := 'a' ['^' int] | 'z' '^' int``."""
    stripped = text.strip()
    offset = len(text) - len(text.lstrip())
    if stripped == "e":
        return Word(s)
    if not stripped:
        raise WordParseError("empty word text (use 'e')", text, 0)
    raw = []
    pos = 0
    while True:
        m = _TOKEN.match(stripped, pos)
        if m is None:
            raise WordParseError("expected 'a', 'a^k' or 'z^r'", text, offset + pos)
        if m.group(1):
            exp = int(m.group(2)) if m.group(2) is not None else 1
            if exp <= 0:
                raise WordParseError("a-exponent must be positive", text, offset + pos)
            raw.append(("a", exp))
        else:
            raw.append(("z", int(m.group(4))))
        pos = m.end()
        if pos == len(stripped):
            break
        if stripped[pos] != ".":
            raise WordParseError("expected '.' between blocks", text, offset + pos)
        pos += 1
    return Word.from_blocks(raw, s)


class CharSum:
    """Finite linear combination of characters.

    Coefficients may be ints, Fractions, :class:`Surd` (exact mode) or floats.
    Zero coefficients are never stored.
    """

    __slots__ = ("terms", "s")

    def __init__(self, terms: dict[Word, object] | None = None, s: int | None = None):
        self.terms: dict[Word, object] = {}
        self.s = s
        for w, c in (terms or {}).items():
            self._accumulate(w, c)

    @classmethod
    def of(cls, w: Word, coeff=1) -> "CharSum":
        return cls({w: coeff}, s=w.s)

    @classmethod
    def unit(cls, s: int) -> "CharSum":
        return cls.of(Word(s))

    def _accumulate(self, w: Word, c) -> None:
        if self.s is None:
            self.s = w.s
        elif w.s != self.s:
            raise ValueError(f"word over s={w.s} added to a character sum over s={self.s}")
        total = self.terms.get(w, 0) + c
        if total:
            self.terms[w] = total
        else:
            self.terms.pop(w, None)

    def items(self) -> list[tuple[Word, object]]:
        """Terms in canonical order (longest first, then lexicographic on blocks)."""
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key(), reverse=True)

    def __iter__(self) -> Iterator[tuple[Word, object]]:
        return iter(self.items())

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, w: Word):
        return self.terms.get(w, 0)

    def __eq__(self, other):
        if not isinstance(other, CharSum):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "CharSum") -> "CharSum":
        out = CharSum(self.terms, self.s)
        for w, c in other.terms.items():
            out._accumulate(w, c)
        return out

    def __sub__(self, other: "CharSum") -> "CharSum":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "CharSum":
        out = CharSum(s=self.s)
        for w, c in self.terms.items():
            out._accumulate(w, scalar * c)
        return out

    def __mul__(self, other):
        if not isinstance(other, CharSum):
            return self.__rmul__(other)
        out = CharSum(s=self.s if self.s is not None else other.s)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                coeff = c1 * c2
                for w, k in _fuse_terms(w1, w2):
                    out._accumulate(w, k * coeff)
        return out

    def star(self) -> "CharSum":
        """Conjugate-linear involution; coefficients here are real so only words change."""
        out = CharSum(s=self.s)
        for w, c in self.terms.items():
            out._accumulate(w.star(), c)
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.items():
            if c == 1:
                parts.append(str(w))
            else:
                parts.append(f"{c}*{w}")
        return " + ".join(parts)

    def __repr__(self):
        return f"CharSum({self})"


@lru_cache(maxsize=None)
def _fuse_terms(w1: Word, w2: Word) -> tuple[tuple[Word, int], ...]:
    _check_same_s(w1, w2)
    s = w1.s
    if not w1.blocks:
        return ((w2, 1),)
    if not w2.blocks:
        return ((w1, 1),)

    b1, b2 = w1.blocks, w2.blocks
    # pure z-powers multiply as group elements
    if len(b1) == 1 and b1[0][0] == "z":
        return ((Word.from_blocks(b1 + b2, s), 1),)
    if len(b2) == 1 and b2[0][0] == "z":
        return ((Word.from_blocks(b1 + b2, s), 1),)

    # w1 = v . a . z^i
    if b1[-1][0] == "z":
        i = b1[-1][1]
        a_exp = b1[-2][1]
        v = b1[:-2] + ((("a", a_exp - 1),) if a_exp > 1 else ())
    else:
        i = 0
        a_exp = b1[-1][1]
        v = b1[:-1] + ((("a", a_exp - 1),) if a_exp > 1 else ())
    # w2 = z^j . a . w
    if b2[0][0] == "z":
        j = b2[0][1]
        a_exp = b2[1][1]
        w = ((("a", a_exp - 1),) if a_exp > 1 else ()) + b2[2:]
    else:
        j = 0
        a_exp = b2[0][1]
        w = ((("a", a_exp - 1),) if a_exp > 1 else ()) + b2[1:]

    if (i + j) % s != 0:
        return ((Word.from_blocks(v + (("a", 1), ("z", i + j), ("a", 1)) + w, s), 1),)

    counts: Counter = Counter()
    counts[Word.from_blocks(v + (("a", 2),) + w, s)] += 1
    for word, k in _fuse_terms(Word.from_blocks(v, s), Word.from_blocks(w, s)):
        counts[word] += k
    return tuple(sorted(counts.items(), key=lambda kv: kv[0].sort_key()))


def fuse(w1: Word, w2: Word) -> CharSum:
    """Fusion product ``chi_{w1} * chi_{w2}`` expanded into irreducible characters."""
    out = CharSum(s=w1.s)
    for w, k in _fuse_terms(w1, w2):
        out._accumulate(w, k)
    return out


def type_of(w: Word) -> int:
    """Half the total a-exponent of ``w``."""
    total = sum(w.a_exponents)
    if total % 2:
        raise ValueError(f"{w} has odd a-degree {total}; it is not in M")
    return total // 2


def ell_of(w: Word) -> tuple[int, ...]:
    """Block tuple ``(l_1, ..., l_k)`` of a word in ``M``."""
    if not w.in_M:
        raise ValueError(f"{w} is not in the submonoid M")
    return w.a_exponents


@dataclass(frozen=True)
class TypeClass:
    """All type-n words sharing the block tuple ``ell``."""

    ell: tuple[int, ...]
    multiplicity: int


def slots_to_ell(n: int, slots: Sequence[int]) -> tuple[int, ...]:
    """Block tuple of ``a z^{r_1} a^2 ... a^2 z^{r_n} a`` whose nonzero slots are ``slots`` (1-based, increasing)."""
    if n == 0:
        return ()
    if not slots:
        return (2 * n,)
    ell = [2 * slots[0] - 1]
    ell.extend(2 * (b - a) for a, b in zip(slots, slots[1:]))
    ell.append(2 * (n - slots[-1]) + 1)
    return tuple(ell)


def enumerate_type_classes(s: int, n: int) -> list[TypeClass]:
    """Type classes of ``M_n``, one per set of nonzero z-slots, with weight ``(s-1)^m``.

    Classes of zero multiplicity (``s = 1``, ``m >= 1``) are omitted.
    """
    if n < 0:
        raise ValueError(f"type must be nonnegative, got {n}")
    if n == 0:
        return [TypeClass((), 1)]
    classes = []
    for m in range(n + 1):
        weight = (s - 1) ** m
        if weight == 0:
            continue
        for slots in itertools.combinations(range(1, n + 1), m):
            classes.append(TypeClass(slots_to_ell(n, slots), weight))
    return classes


def words_of_type(s: int, n: int) -> list[Word]:
    """The ``s^n`` words ``a z^{r_1} a^2 ... a^2 z^{r_n} a``, reduced."""
    if n == 0:
        return [Word(s)]
    words = []
    for rs in itertools.product(range(s), repeat=n):
        raw: list[Block] = [("a", 1)]
        for k, r in enumerate(rs):
            raw.append(("z", r))
            raw.append(("a", 2 if k < n - 1 else 1))
        words.append(Word.from_blocks(raw, s))
    return words


def x_n(s: int, n: int, exact: bool = True) -> CharSum:
    """Normalised type sum ``s^(-n/2) * sum_{w in M_n} chi_w``."""
    scale = Surd.sqrt_s_power(s, -n) if exact else s ** (-n / 2)
    out = CharSum(s=s)
    for w in words_of_type(s, n):
        out._accumulate(w, scale)
    return out


def cond_expect_F(x: CharSum) -> list:
    """Coefficients ``c_n`` with ``F[x] = sum_n c_n x_n``.

    A type-n character contributes ``coeff * s^(-n/2)`` to ``c_n``.  Exact
    coefficients stay exact (as :class:`Surd`); floats stay floats.
    """
    if not x.terms:
        return []
    s = x.s
    contributions: dict[int, object] = {}
    for w, coeff in x.terms.items():
        if not w.in_M:
            raise ValueError(f"{w} is not in M; conditional expectation undefined")
        n = type_of(w)
        if isinstance(coeff, (Surd, Rational)):
            scale = Surd.sqrt_s_power(s, -n)
        else:
            scale = s ** (-n / 2)
        contributions[n] = contributions.get(n, 0) + coeff * scale
    top = max(contributions)
    return [contributions.get(n, 0) for n in range(top + 1)]


def fusion_recurrence_defect(s: int, n: int) -> CharSum:
    """``x_1 x_n - (x_{n+1} + sqrt(s) x_n + x_{n-1})`` in exact arithmetic; zero when the recurrence holds."""
    if n < 1:
        raise ValueError("the recurrence is stated for n >= 1")
    lhs = x_n(s, 1) * x_n(s, n)
    root = Surd(0, 1, s)
    rhs = x_n(s, n + 1) + root * x_n(s, n) + x_n(s, n - 1)
    return lhs - rhs
