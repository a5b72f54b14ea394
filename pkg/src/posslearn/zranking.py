"""Tolerance, Z-ordering and the possibilistic encoding of rational closure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List

from .logic import Clause, is_satisfiable
from .possibilistic import DefaultRule, PossTheory, covers


class InconsistentDefaults(ValueError):
    """No remaining default is tolerated; rational closure is undefined."""


def _rule_key(d: DefaultRule):
    return str(d)


def is_tolerated(d: DefaultRule, delta: Iterable[DefaultRule]) -> bool:
    """Whether a & b & AND_i(!a_i | b_i) is satisfiable for d = a ~> b."""
    f: List[Clause] = d.antecedent.as_units() + [d.consequent]
    f.extend(r.material_clause() for r in delta)
    return is_satisfiable(f)


@dataclass(frozen=True)
class ZStratification:
    levels: tuple  # of frozenset[DefaultRule], most general first

    def __len__(self):
        return len(self.levels)


def z_ordering(delta: Iterable[DefaultRule]) -> ZStratification:
    remaining = sorted(set(delta), key=_rule_key)
    if not remaining:
        raise ValueError("z_ordering: empty default set")
    levels = []
    while remaining:
        tolerated = [d for d in remaining if is_tolerated(d, remaining)]
        if not tolerated:
            raise InconsistentDefaults(
                "inconsistent default set: none of "
                + ", ".join(str(d) for d in remaining) + " is tolerated")
        levels.append(frozenset(tolerated))
        remaining = [d for d in remaining if d not in levels[-1]]
    return ZStratification(tuple(levels))


def to_poss_theory(z: ZStratification) -> PossTheory:
    """Stratum i holds !a | b for each a ~> b in level i.

    Two defaults with the same clause in different levels keep only the
    higher copy; cuts cannot tell the difference.
    """
    strata = []
    seen = set()
    for level in reversed(z.levels):
        s = frozenset(d.material_clause() for d in level) - seen
        seen |= s
        strata.append(s)
    strata.reverse()
    return PossTheory(tuple(s for s in strata if s))


def rational_closure_entails(delta: Iterable[DefaultRule], q: DefaultRule) -> bool:
    return covers(to_poss_theory(z_ordering(delta)), q) == 1
