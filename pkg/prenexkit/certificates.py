"""
Certificates module - semi-classical principles consumed by rewrites.

Responsible for:
- PrincipleTag (schema, class, level, optional double negation)
- Certificate: the set of tags a transformation used, normalized against
  the HA floor (level-0 principles over decidable atoms)
- The derivability preorder and budget_leq
- The characterization table (pnft_budget) and per-operation budgets

Tags render in two spellings: unicode (Σ_1-DNE, (Π_1∨Π_1)-DNE, ¬¬Σ_0-DNE)
and ascii (Sigma_1-DNE, (Pi_1|Pi_1)-DNE, ~~Sigma_0-DNE). Both parse.
"""

import logging
import re
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable, Optional

from prenexkit.errors import PrenexKitError, UnknownRowError

logger = logging.getLogger(__name__)


class Schema(str, Enum):
    LEM = "LEM"
    DNE = "DNE"
    DNS = "DNS"
    DML = "DML"


class TagClass(str, Enum):
    SIGMA = "Sigma"
    PI = "Pi"
    PI_OR_PI = "Pi|Pi"
    U = "U"
    E = "E"
    U_PLUS = "U^+"
    E_PLUS = "E^+"


_UNICODE = {"Sigma": "Σ", "Pi": "Π"}


@dataclass(frozen=True, order=True)
class PrincipleTag:
    """One principle schema restricted to a class at a level."""
    schema: Schema
    cls: TagClass
    level: int
    double_negated: bool = False

    def lifted(self) -> "PrincipleTag":
        """¬¬P; double negation never nests."""
        return replace(self, double_negated=True)

    def plain(self) -> "PrincipleTag":
        return replace(self, double_negated=False)

    def at(self, level: int) -> "PrincipleTag":
        return replace(self, level=level)

    def render(self, ascii: bool = False) -> str:
        k = self.level
        if self.cls == TagClass.PI_OR_PI:
            if ascii:
                body = f"(Pi_{k}|Pi_{k})"
            else:
                body = f"(Π_{k}∨Π_{k})"
        elif self.cls in (TagClass.U_PLUS, TagClass.E_PLUS):
            body = f"{self.cls.value[0]}_{k}^+"
        else:
            name = self.cls.value if ascii else _UNICODE.get(self.cls.value, self.cls.value)
            body = f"{name}_{k}"
        prefix = ("~~" if ascii else "¬¬") if self.double_negated else ""
        return f"{prefix}{body}-{self.schema.value}"

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def parse(cls, text: str) -> "PrincipleTag":
        """
        Parse a tag in either spelling.

        Raises:
            PrenexKitError: If the text is not a tag.
        """
        match = _TAG_PATTERN.match(_normalize_text(text))
        if not match:
            raise PrenexKitError(f"Not a principle tag: {text!r}")
        nn_prefix, left, right, name, level, plus, schema = match.groups()
        if left is not None:
            if left != right:
                raise PrenexKitError(f"Mismatched levels in {text!r}")
            tag_class, k = TagClass.PI_OR_PI, int(left)
        else:
            k = int(level)
            if plus:
                if name not in ("U", "E"):
                    raise PrenexKitError(f"Only U and E take ^+: {text!r}")
                tag_class = TagClass.U_PLUS if name == "U" else TagClass.E_PLUS
            else:
                tag_class = TagClass(name)
        return cls(Schema(schema), tag_class, k, bool(nn_prefix))


_TAG_PATTERN = re.compile(
    r"^(~~)?(?:\(Pi_(\d+)\|Pi_(\d+)\)|(Sigma|Pi|U|E)_(\d+)(\^\+)?)-(LEM|DNE|DNS|DML)$"
)


def _normalize_text(text: str) -> str:
    out = text.strip().replace(" ", "")
    for src, dst in (("¬¬", "~~"), ("Σ", "Sigma"), ("Π", "Pi"), ("∨", "|"), ("^{+}", "^+")):
        out = out.replace(src, dst)
    return out


# --- Tag constructors ---

def sigma_dne(k: int) -> PrincipleTag:
    return PrincipleTag(Schema.DNE, TagClass.SIGMA, k)


def pi_dne(k: int) -> PrincipleTag:
    return PrincipleTag(Schema.DNE, TagClass.PI, k)


def pi_or_pi_dne(k: int) -> PrincipleTag:
    return PrincipleTag(Schema.DNE, TagClass.PI_OR_PI, k)


def u_plus_dns(k: int) -> PrincipleTag:
    return PrincipleTag(Schema.DNS, TagClass.U_PLUS, k)


def sigma_lem(k: int) -> PrincipleTag:
    return PrincipleTag(Schema.LEM, TagClass.SIGMA, k)


def pi_lem(k: int) -> PrincipleTag:
    return PrincipleTag(Schema.LEM, TagClass.PI, k)


# --- Certificates ---

@dataclass(frozen=True)
class Certificate:
    """
    Sorted, duplicate-free collection of principle tags.

    Multiplicity carries no information for derivability, so repeated uses
    of one principle are recorded once.
    """
    tags: tuple = ()

    @classmethod
    def of(cls, *tags: Optional[PrincipleTag]) -> "Certificate":
        """Build from tags, dropping None and negative levels."""
        kept = {t for t in tags if t is not None and t.level >= 0}
        return cls(tuple(sorted(kept)))

    @classmethod
    def union_all(cls, certificates: Iterable["Certificate"]) -> "Certificate":
        tags: list = []
        for certificate in certificates:
            tags.extend(certificate.tags)
        return cls.of(*tags)

    def __or__(self, other: "Certificate") -> "Certificate":
        return Certificate.of(*self.tags, *other.tags)

    def __iter__(self):
        return iter(self.tags)

    def __len__(self) -> int:
        return len(self.tags)

    def __bool__(self) -> bool:
        return bool(self.tags)

    def lifted(self) -> "Certificate":
        return Certificate.of(*(t.lifted() for t in self.tags))

    def normalized(self) -> "Certificate":
        """Drop every tag HA already proves."""
        return Certificate.of(*(t for t in self.tags if not ha_proves(t)))

    def render(self, ascii: bool = False) -> str:
        if not self.tags:
            return "{}" if ascii else "∅"
        return ", ".join(t.render(ascii) for t in self.tags)

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def parse(cls, text: str) -> "Certificate":
        """Comma- or plus-separated tags; '{}', '∅' or 'none' is empty."""
        body = text.strip().strip("{}").strip()
        if body in ("", "∅", "none"):
            return cls()
        parts = re.split(r"\s*,\s*|\s+\+\s+", body)
        return cls.of(*(PrincipleTag.parse(p) for p in parts if p.strip()))


EMPTY = Certificate()


# --- Derivability ---

def _single_premise_consequences(tag: PrincipleTag) -> list:
    """Tags derivable from one tag by one rule."""
    out: list = []
    k = tag.level
    s, c, nn = tag.schema, tag.cls, tag.double_negated

    def add(result: PrincipleTag, lift: bool = nn) -> None:
        if result.level >= 0:
            out.append(result.lifted() if lift else result)

    if not nn:
        add(tag.lifted(), lift=False)
    if k > 0:
        add(tag.at(k - 1))
    if s == Schema.LEM:
        add(replace(tag, schema=Schema.DNE))

    # Class inclusions: a principle for a larger class gives the smaller one.
    if c == TagClass.U_PLUS:
        add(replace(tag, cls=TagClass.U))
        add(replace(tag, cls=TagClass.PI))
    if c == TagClass.E_PLUS:
        add(replace(tag, cls=TagClass.E))
        add(replace(tag, cls=TagClass.SIGMA))
    if c == TagClass.U and s == Schema.DNS:
        add(replace(tag, cls=TagClass.U_PLUS))
    if c == TagClass.PI_OR_PI and s == Schema.DNE:
        add(replace(tag, cls=TagClass.PI))

    if s == Schema.DNE and c == TagClass.SIGMA:
        add(pi_or_pi_dne(k - 1))
        add(pi_dne(k + 1))
    if s == Schema.DNE and c == TagClass.PI_OR_PI:
        add(sigma_dne(k - 1))
        if nn:
            add(u_plus_dns(k), lift=False)
    if s == Schema.DNS and c == TagClass.U_PLUS:
        add(sigma_lem(k - 1), lift=True)
    # DNS has a negative conclusion, so its double negation gives it back.
    if s == Schema.DNS and nn:
        add(tag.plain(), lift=False)
    return out


def _floor_tags() -> set:
    tags = set()
    for schema in (Schema.LEM, Schema.DNE, Schema.DNS):
        for tag_class in TagClass:
            tag = PrincipleTag(schema, tag_class, 0)
            tags.add(tag)
            tags.add(tag.lifted())
    return tags


def closure(premises: Iterable[PrincipleTag], max_level: int) -> frozenset:
    """
    Every tag derivable from premises plus the HA floor.

    Levels above max_level + 1 are never explored; no rule derives a
    tag above that bound which could lead back below it.
    """
    seen = set(premises) | _floor_tags()
    queue = deque(seen)
    bound = max_level + 1
    while queue:
        tag = queue.popleft()
        for derived in _single_premise_consequences(tag):
            if derived.level > bound or derived in seen:
                continue
            seen.add(derived)
            queue.append(derived)
    return frozenset(seen)


@lru_cache(maxsize=4096)
def _closure_cached(premises: tuple, max_level: int) -> frozenset:
    return closure(premises, max_level)


def ha_proves(tag: PrincipleTag) -> bool:
    """True if the tag follows from the HA floor alone."""
    return tag in _closure_cached((), tag.level)


def budget_leq(certificate: Certificate, budget: Certificate) -> bool:
    """
    Derivability preorder: every tag of certificate follows from budget.

    Args:
        certificate: Tags used by a transformation.
        budget: Tags the verification theory provides.

    Returns:
        True if each tag of certificate lies in the closure of budget.
    """
    levels = [t.level for t in certificate] + [t.level for t in budget] + [0]
    derivable = _closure_cached(tuple(budget), max(levels))
    return all(tag in derivable for tag in certificate)


# --- Characterization table ---

@dataclass(frozen=True)
class BudgetRow:
    """One row: principles P (required) and Q (side) for a source/target pair."""
    source: str
    target: str
    required: tuple  # level offsets: (constructor, offset, lifted)
    side: tuple

    def instantiate(self, k: int) -> tuple:
        def build(entries) -> Certificate:
            tags = []
            for make, offset, lifted in entries:
                tag = make(k + offset)
                tags.append(tag.lifted() if lifted else tag)
            return Certificate.of(*tags)

        return build(self.required), build(self.side)


BUDGET_ROWS = (
    BudgetRow("df(~~U_k)", "~~Pi_k", ((sigma_dne, -1, True),), ((pi_lem, -2, True),)),
    BudgetRow("~~U_k", "~~Pi_k", ((u_plus_dns, 0, False),), ()),
    BudgetRow("df(U_k)", "Pi_k", ((sigma_dne, -1, False),), ((pi_lem, -2, False),)),
    BudgetRow("~~U_k", "Pi_k", ((sigma_dne, -1, False), (u_plus_dns, 0, False)), ((pi_lem, -2, False),)),
    BudgetRow("df(E_k)", "Sigma_k", ((sigma_dne, 0, False),), ((pi_lem, -1, False),)),
    BudgetRow("E_k", "Sigma_k", ((sigma_dne, 0, False), (u_plus_dns, 0, False)), ((pi_lem, -1, False),)),
    BudgetRow("U_k", "Pi_k", ((pi_or_pi_dne, 0, False),), ()),
    BudgetRow("U_k&E_k", "Pi_k&Sigma_k", ((sigma_dne, 0, False), (pi_or_pi_dne, 0, False)), ()),
)


def _normalize_class_name(text: str) -> str:
    out = text.strip().replace(" ", "")
    for src, dst in (
        ("¬¬", "~~"), ("Σ", "Sigma"), ("Π", "Pi"), ("∧", "&"),
        ("{", ""), ("}", ""), ("−", "-"), ("∨", "v"),
    ):
        out = out.replace(src, dst)
    if out.endswith("^-v"):
        out = f"df({out[:-3].strip('()')})"
    return out


def pnft_budget(source: str, target: str, k: int) -> tuple:
    """
    Principles of the characterization table for a (source, target) row.

    Args:
        source: Source class, e.g. 'U_k', 'E_k', 'df(E_k)', '~~U_k'
                (unicode and the ^{−∨} suffix are accepted).
        target: Target class, e.g. 'Pi_k', 'Sigma_k', '~~Pi_k'.
        k: Level.

    Returns:
        (required, side) Certificates; tags below level 0 are dropped.

    Raises:
        UnknownRowError: If no row matches.
    """
    src = _normalize_class_name(source)
    dst = _normalize_class_name(target)
    for row in BUDGET_ROWS:
        if row.source == src and row.target == dst:
            return row.instantiate(k)
    raise UnknownRowError(f"No budget row for ({source}, {target})")


# --- Per-operation budgets ---

def _neg_prenex_budget(k: int, input_kind: Optional[str]) -> Certificate:
    return Certificate.of(sigma_dne(k) if input_kind == "Pi" else sigma_dne(k - 1))


OPERATION_BUDGETS = {
    "conj_prenex": lambda k, kind: EMPTY,
    "disj_sigma": lambda k, kind: EMPTY,
    "pad": lambda k, kind: EMPTY,
    "contract": lambda k, kind: EMPTY,
    "dn_disj_pi": lambda k, kind: Certificate.of(sigma_dne(k - 1).lifted()),
    "neg_prenex": _neg_prenex_budget,
    "neg_pi_nn": lambda k, kind: Certificate.of(sigma_dne(k).lifted()),
    "nn_u_prenex": lambda k, kind: Certificate.of(u_plus_dns(k)),
    "nn_e_prenex": lambda k, kind: Certificate.of(u_plus_dns(k)),
    "prenex_e": lambda k, kind: pnft_budget("E_k", "Sigma_k", k)[0],
    "prenex_u": lambda k, kind: pnft_budget("U_k", "Pi_k", k)[0],
    "neg_e_nn_pi": lambda k, kind: Certificate.of(pi_or_pi_dne(k).lifted()),
    "prenex_df_e": lambda k, kind: pnft_budget("df(E_k)", "Sigma_k", k)[0],
    "prenex_df_u": lambda k, kind: pnft_budget("df(U_k)", "Pi_k", k)[0],
    "neg_e_nn_pi_df": lambda k, kind: Certificate.of(sigma_dne(k - 1).lifted()),
}


def operation_budget(operation: str, k: int, input_kind: Optional[str] = None) -> Certificate:
    """
    Declared budget of an engine operation at level k.

    Args:
        operation: Key of OPERATION_BUDGETS (the PrenexEngine method name,
                   prenex_df split into prenex_df_e / prenex_df_u).
        k: Level.
        input_kind: "Pi" or "Sigma"; only neg_prenex depends on it.

    Raises:
        UnknownRowError: If the operation is unknown.
    """
    try:
        budget = OPERATION_BUDGETS[operation]
    except KeyError:
        raise UnknownRowError(f"No budget declared for operation {operation!r}") from None
    return budget(k, input_kind)
