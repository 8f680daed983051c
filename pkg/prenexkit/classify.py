"""
Classify module - alternation paths, degree and formula classes.

Responsible for:
- Alternation paths and the ALT recursion
- Degree and the F_k / E_k / U_k / E_k^+ / U_k^+ classes
- Prenex shapes Sigma_k / Pi_k, cumulative (default) or strict
- Least levels used by the prenex engine to tag principles precisely

Classification is purely syntactic.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

from prenexkit.formula import (
    Binary,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    contains_or,
    split_prefix,
    quantifier_free,
)


PLUS = "+"
MINUS = "-"
NO_HEAD = "×"


@dataclass(frozen=True, order=True)
class AlternationPath:
    """A strictly alternating word over {+, -}."""
    signs: tuple = ()

    def __post_init__(self):
        for a, b in zip(self.signs, self.signs[1:]):
            if a == b:
                raise ValueError(f"Not an alternation path: {''.join(self.signs)}")

    @property
    def head(self) -> str:
        """i(s): the first sign, or × for the empty path."""
        return self.signs[0] if self.signs else NO_HEAD

    @property
    def length(self) -> int:
        return len(self.signs)

    def flip(self) -> "AlternationPath":
        return AlternationPath(tuple(PLUS if s == MINUS else MINUS for s in self.signs))

    def prepend(self, sign: str) -> "AlternationPath":
        """Prefix sign unless the path already starts with it."""
        if self.head == sign:
            return self
        return AlternationPath((sign,) + self.signs)

    def __str__(self) -> str:
        return "<" + ",".join(self.signs) + ">"

    @classmethod
    def parse(cls, text: str) -> "AlternationPath":
        """Inverse of str(); also accepts a bare word such as '+-+'."""
        body = text.strip().strip("<>⟨⟩").replace(",", "").replace(" ", "")
        return cls(tuple(body.replace("−", MINUS)))


def flip(path: AlternationPath) -> AlternationPath:
    return path.flip()


EMPTY_PATH = AlternationPath()


@lru_cache(maxsize=65536)
def alt_paths(phi: Formula) -> frozenset:
    """
    The set of alternation paths ALT(phi).

    Args:
        phi: A formula.

    Returns:
        Nonempty frozenset of AlternationPath.
    """
    if quantifier_free(phi):
        return frozenset({EMPTY_PATH})
    if isinstance(phi, Not):
        return frozenset(s.flip() for s in alt_paths(phi.body))
    if isinstance(phi, Implies):
        return frozenset(s.flip() for s in alt_paths(phi.left)) | alt_paths(phi.right)
    if isinstance(phi, Binary):
        return alt_paths(phi.left) | alt_paths(phi.right)
    sign = MINUS if isinstance(phi, Forall) else PLUS
    return frozenset(s.prepend(sign) for s in alt_paths(phi.body))


def degree(phi: Formula) -> int:
    """Length of the longest alternation path."""
    return max(s.length for s in alt_paths(phi))


def _heads_at(phi: Formula, length: int) -> set:
    return {s.head for s in alt_paths(phi) if s.length == length}


def in_f(phi: Formula, k: int) -> bool:
    return degree(phi) == k


def in_e(phi: Formula, k: int) -> bool:
    d = degree(phi)
    if d != k:
        return False
    return k == 0 or _heads_at(phi, k) == {PLUS}


def in_u(phi: Formula, k: int) -> bool:
    d = degree(phi)
    if d != k:
        return False
    return k == 0 or _heads_at(phi, k) == {MINUS}


def in_e_plus(phi: Formula, k: int) -> bool:
    return degree(phi) < k or in_e(phi, k)


def in_u_plus(phi: Formula, k: int) -> bool:
    return degree(phi) < k or in_u(phi, k)


def least_e_plus(phi: Formula) -> int:
    """Least k with phi in E_k^+."""
    d = degree(phi)
    return d if in_e(phi, d) else d + 1


def least_u_plus(phi: Formula) -> int:
    """Least k with phi in U_k^+."""
    d = degree(phi)
    return d if in_u(phi, d) else d + 1


u_level = least_u_plus
e_level = least_e_plus


# --- Prenex shapes ---

class ShapeKind(str, Enum):
    SIGMA = "Sigma"
    PI = "Pi"


@dataclass(frozen=True)
class PrenexShape:
    """Minimal prenex shape; level 0 fits both kinds."""
    kind: ShapeKind
    level: int
    cumulative: bool = True

    def __str__(self) -> str:
        return f"{self.kind.value}_{self.level}"


def prenex_shape(phi: Formula, cumulative: bool = True) -> Optional[PrenexShape]:
    """
    Minimal Sigma/Pi shape of a prenex formula.

    Args:
        phi: A formula.
        cumulative: Report under the cumulative identification (the
                    default) or the strict definition. The minimal shape
                    is the same in both; the flag is recorded for
                    membership queries.

    Returns:
        PrenexShape, or None when phi is not prenex.
    """
    prefix, matrix = split_prefix(phi)
    if not quantifier_free(matrix):
        return None
    level = 0
    previous = None
    for quantifier, _ in prefix:
        if quantifier is not previous:
            level += 1
            previous = quantifier
    if not prefix:
        return PrenexShape(ShapeKind.SIGMA, 0, cumulative)
    kind = ShapeKind.SIGMA if prefix[0][0] is Exists else ShapeKind.PI
    return PrenexShape(kind, level, cumulative)


def in_shape(phi: Formula, kind: ShapeKind, k: int, cumulative: bool = True) -> bool:
    """Membership in Sigma_k (kind SIGMA) or Pi_k (kind PI)."""
    shape = prenex_shape(phi, cumulative)
    if shape is None:
        return False
    if shape.level == 0:
        return k >= 0 if cumulative else k == 0
    if cumulative:
        return shape.level < k or (shape.level == k and shape.kind == kind)
    return shape.level == k and shape.kind == kind


def in_sigma(phi: Formula, k: int, cumulative: bool = True) -> bool:
    return in_shape(phi, ShapeKind.SIGMA, k, cumulative)


def in_pi(phi: Formula, k: int, cumulative: bool = True) -> bool:
    return in_shape(phi, ShapeKind.PI, k, cumulative)


def sigma_level(phi: Formula) -> Optional[int]:
    """Least k with phi in cumulative Sigma_k, None if not prenex."""
    shape = prenex_shape(phi)
    if shape is None:
        return None
    if shape.level == 0 or shape.kind == ShapeKind.SIGMA:
        return shape.level
    return shape.level + 1


def pi_level(phi: Formula) -> Optional[int]:
    """Least k with phi in cumulative Pi_k, None if not prenex."""
    shape = prenex_shape(phi)
    if shape is None:
        return None
    if shape.level == 0 or shape.kind == ShapeKind.PI:
        return shape.level
    return shape.level + 1


def is_or_free(phi: Formula) -> bool:
    return not contains_or(phi)


# --- Labels ---

@dataclass(frozen=True)
class ClassLabel:
    """Class membership of a formula at a given level."""
    k: int
    degree: int
    in_f: bool
    in_e: bool
    in_u: bool
    in_e_plus: bool
    in_u_plus: bool
    least_e_plus: int
    least_u_plus: int
    shape: Optional[PrenexShape] = None

    def names(self) -> list:
        """Names of the classes the formula belongs to at level k."""
        out = []
        for flag, name in (
            (self.in_f, "F"),
            (self.in_e, "E"),
            (self.in_u, "U"),
            (self.in_e_plus, "E^+"),
            (self.in_u_plus, "U^+"),
        ):
            if flag:
                base, _, plus = name.partition("^")
                out.append(f"{base}_{self.k}" + (f"^{plus}" if plus else ""))
        return out

    @property
    def least_class(self) -> str:
        """The smallest E/U/F class at the formula's own degree."""
        d = self.degree
        if d == 0:
            return "F_0"
        if self.least_e_plus == d:
            return f"E_{d}"
        if self.least_u_plus == d:
            return f"U_{d}"
        return f"F_{d}"


def class_membership(phi: Formula, k: int, cumulative: bool = True) -> ClassLabel:
    """
    Compute the class flags of phi at level k.

    Args:
        phi: A formula.
        k: Level to test.
        cumulative: Convention for the reported prenex shape.

    Returns:
        ClassLabel with F_k/E_k/U_k/E_k^+/U_k^+ flags and least levels.
    """
    return ClassLabel(
        k=k,
        degree=degree(phi),
        in_f=in_f(phi, k),
        in_e=in_e(phi, k),
        in_u=in_u(phi, k),
        in_e_plus=in_e_plus(phi, k),
        in_u_plus=in_u_plus(phi, k),
        least_e_plus=least_e_plus(phi),
        least_u_plus=least_u_plus(phi),
        shape=prenex_shape(phi, cumulative),
    )
