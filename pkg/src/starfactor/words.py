"""Letters, words, and their exact 3x3 integer matrix semantics.

A word is a finite sequence of letters read left to right.  A letter is
either elementary -- ``E(i, j, sign)``, the identity matrix with a single
extra ``sign`` entry at position ``(i, j)`` -- or a cyclic permutation
letter ``R(k, j, i)`` naming the 3-cycle ``i -> j -> k -> i`` on the
index set ``{1, 2, 3}``.  Words evaluate to exact integer matrices by
multiplying letter matrices in reading order, starting from the identity;
all entries are arbitrary-precision Python ints, so powers like ``E(i, j)**m``
never overflow.

The matrix of ``R(k, j, i)`` is pinned by the conjugation contract
``P * E(l, m) * P**-1 == E(r(l), r(m))`` where ``r`` is the named cycle;
that contract determines the column arrangement uniquely and a frozen test
guards it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

INDICES = (1, 2, 3)

# A rotation is stored as the tuple (r(1), r(2), r(3)).
Rotation = tuple[int, int, int]
ROT_IDENTITY: Rotation = (1, 2, 3)


class ParseError(ValueError):
    """Word text that does not match the grammar; carries the offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class Symbol(NamedTuple):
    """One letter of the alphabet.

    ``kind == "E"``: fields are ``(i, j, sign)`` with ``i != j`` and sign +-1.
    ``kind == "R"``: fields are the canonical permutation triple; triples
    naming the same 3-cycle are identified, with the representative chosen
    so the last entry is 1 (``R321`` and ``R231`` are the two rotations).
    """

    kind: str
    a: int
    b: int
    c: int

    @property
    def is_elem(self) -> bool:
        return self.kind == "E"

    @property
    def is_perm(self) -> bool:
        return self.kind == "R"

    @property
    def sign(self) -> int:
        if self.kind != "E":
            raise ValueError("sign is only defined for elementary letters")
        return self.c

    def inverse(self) -> "Symbol":
        if self.kind == "E":
            return Symbol("E", self.a, self.b, -self.c)
        return perm_symbol(rot_inverse(rotation_of_triple(self.a, self.b, self.c)))

    def __str__(self) -> str:
        return format_symbol(self)


Word = tuple[Symbol, ...]


def E(i: int, j: int, sign: int = 1) -> Symbol:
    """Elementary letter E_ij or its inverse."""
    if i not in INDICES or j not in INDICES or i == j:
        raise ValueError(f"invalid elementary indices ({i}, {j})")
    if sign not in (1, -1):
        raise ValueError(f"invalid sign {sign}")
    return Symbol("E", i, j, sign)


def R(k: int, j: int, i: int) -> Symbol:
    """Permutation letter for the cycle i -> j -> k -> i, canonicalized."""
    if sorted((k, j, i)) != [1, 2, 3]:
        raise ValueError(f"invalid permutation triple ({k}, {j}, {i})")
    return perm_symbol(rotation_of_triple(k, j, i))


# -- rotations ---------------------------------------------------------------


def rotation_of_triple(k: int, j: int, i: int) -> Rotation:
    """The cycle r with r(i) = j, r(j) = k, r(k) = i."""
    out = [0, 0, 0]
    out[i - 1] = j
    out[j - 1] = k
    out[k - 1] = i
    return (out[0], out[1], out[2])


def rot_compose(s: Rotation, t: Rotation) -> Rotation:
    """(s o t): first t, then s -- matches matrix product P_s * P_t."""
    return (s[t[0] - 1], s[t[1] - 1], s[t[2] - 1])


def rot_inverse(s: Rotation) -> Rotation:
    out = [0, 0, 0]
    for x in INDICES:
        out[s[x - 1] - 1] = x
    return (out[0], out[1], out[2])


def perm_symbol(rot: Rotation) -> Symbol:
    """Canonical R letter for a nontrivial rotation."""
    if rot == ROT_IDENTITY:
        raise ValueError("identity rotation has no permutation letter")
    # triple (k, j, i) with i = 1, j = r(1), k = r(r(1))
    j = rot[0]
    k = rot[j - 1]
    return Symbol("R", k, j, 1)


def rotation_of(sym: Symbol) -> Rotation:
    if sym.kind != "R":
        raise ValueError("not a permutation letter")
    return rotation_of_triple(sym.a, sym.b, sym.c)


def relabel(sym: Symbol, rot: Rotation) -> Symbol:
    """Apply a rotation to the indices of an elementary letter."""
    if sym.kind != "E":
        raise ValueError("only elementary letters are relabeled")
    return Symbol("E", rot[sym.a - 1], rot[sym.b - 1], sym.c)


def mirror_word(word: Iterable[Symbol]) -> Word:
    """Reverse the word and invert every letter."""
    return tuple(sym.inverse() for sym in reversed(tuple(word)))


# -- matrices ----------------------------------------------------------------

Row = tuple[int, int, int]


@dataclass(frozen=True)
class IntMatrix3:
    """Exact 3x3 integer matrix."""

    rows: tuple[Row, Row, Row]

    @staticmethod
    def identity() -> "IntMatrix3":
        return IntMatrix3(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @staticmethod
    def from_columns(c1, c2, c3) -> "IntMatrix3":
        return IntMatrix3(tuple(zip(c1, c2, c3)))  # type: ignore[arg-type]

    def columns(self) -> tuple[Row, Row, Row]:
        r = self.rows
        return tuple((r[0][k], r[1][k], r[2][k]) for k in range(3))  # type: ignore[return-value]

    def __mul__(self, other: "IntMatrix3") -> "IntMatrix3":
        a, b = self.rows, other.rows
        return IntMatrix3(
            tuple(
                tuple(sum(a[r][t] * b[t][c] for t in range(3)) for c in range(3))
                for r in range(3)
            )  # type: ignore[arg-type]
        )

    def __pow__(self, n: int) -> "IntMatrix3":
        if n < 0:
            return self.inverse() ** (-n)
        out = IntMatrix3.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def det(self) -> int:
        ((a, b, c), (d, e, f), (g, h, i)) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def adjugate(self) -> "IntMatrix3":
        ((a, b, c), (d, e, f), (g, h, i)) = self.rows
        return IntMatrix3(
            (
                (e * i - f * h, c * h - b * i, b * f - c * e),
                (f * g - d * i, a * i - c * g, c * d - a * f),
                (d * h - e * g, b * g - a * h, a * e - b * d),
            )
        )

    def inverse(self) -> "IntMatrix3":
        d = self.det()
        if d not in (1, -1):
            raise ValueError(f"matrix with determinant {d} has no integer inverse")
        adj = self.adjugate()
        if d == 1:
            return adj
        return IntMatrix3(tuple(tuple(-x for x in row) for row in adj.rows))  # type: ignore[arg-type]

    def apply(self, vec):
        """Matrix-vector product; works for ints and Fractions."""
        r = self.rows
        return tuple(r[t][0] * vec[0] + r[t][1] * vec[1] + r[t][2] * vec[2] for t in range(3))


def elem_matrix(i: int, j: int, sign: int = 1) -> IntMatrix3:
    """Identity with the entry ``sign`` at position (i, j)."""
    if i not in INDICES or j not in INDICES or i == j:
        raise ValueError(f"invalid elementary indices ({i}, {j})")
    if sign not in (1, -1):
        raise ValueError(f"invalid sign {sign}")
    rows = [[1 if r == c else 0 for c in range(3)] for r in range(3)]
    rows[i - 1][j - 1] = sign
    return IntMatrix3(tuple(tuple(row) for row in rows))  # type: ignore[arg-type]


def perm_matrix(k: int, j: int, i: int) -> IntMatrix3:
    """Permutation matrix P with P E_lm P^-1 = E_{r(l) r(m)}, r: i->j->k->i.

    Column b holds the unit vector e_{r(b)}.
    """
    if sorted((k, j, i)) != [1, 2, 3]:
        raise ValueError(f"invalid permutation triple ({k}, {j}, {i})")
    rot = rotation_of_triple(k, j, i)
    rows = [[0, 0, 0] for _ in range(3)]
    for col in INDICES:
        rows[rot[col - 1] - 1][col - 1] = 1
    return IntMatrix3(tuple(tuple(row) for row in rows))  # type: ignore[arg-type]


def matrix_of(sym: Symbol) -> IntMatrix3:
    if sym.kind == "E":
        return elem_matrix(sym.a, sym.b, sym.c)
    return perm_matrix(sym.a, sym.b, sym.c)


def eval_word(word: Iterable[Symbol]) -> IntMatrix3:
    """Left-to-right product of letter matrices, starting from the identity."""
    out = IntMatrix3.identity()
    for sym in word:
        out = out * matrix_of(sym)
    return out


# -- text form ---------------------------------------------------------------
#
# word   := (letter SP*)*
# letter := "E" digit digit ["^-1"] | "R" digit digit digit      digits in 1..3


def format_symbol(sym: Symbol) -> str:
    if sym.kind == "E":
        return f"E{sym.a}{sym.b}" + ("^-1" if sym.c < 0 else "")
    return f"R{sym.a}{sym.b}{sym.c}"


def format_word(word: Iterable[Symbol]) -> str:
    return " ".join(format_symbol(sym) for sym in word)


def parse_word(text: str) -> Word:
    """Parse the word grammar; whitespace between letters is optional."""
    out: list[Symbol] = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == "E":
            if pos + 2 >= n:
                raise ParseError("truncated elementary letter", pos)
            di, dj = text[pos + 1], text[pos + 2]
            if di not in "123" or dj not in "123":
                raise ParseError(f"invalid index digits {di!r}{dj!r}", pos + 1)
            i, j = int(di), int(dj)
            if i == j:
                raise ParseError(f"equal indices in E{di}{dj}", pos + 1)
            pos += 3
            sign = 1
            if text.startswith("^-1", pos):
                sign = -1
                pos += 3
            out.append(E(i, j, sign))
        elif ch == "R":
            digits = text[pos + 1 : pos + 4]
            if len(digits) < 3 or any(d not in "123" for d in digits):
                raise ParseError("invalid permutation triple", pos + 1)
            k, j, i = (int(d) for d in digits)
            if sorted((k, j, i)) != [1, 2, 3]:
                raise ParseError(f"R{digits} is not a permutation of 123", pos + 1)
            out.append(R(k, j, i))
            pos += 4
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)
    return tuple(out)
