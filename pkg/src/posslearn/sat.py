"""A small complete DPLL solver over integer literals.

Two watched literals for unit propagation, chronological backtracking, no
clause learning. Instances here have at most a few hundred variables, so the
priority is determinism and zero dependencies.
"""

from __future__ import annotations

from typing import List, Optional, Sequence


def solve_int_cnf(nvars: int, clauses: Sequence[Sequence[int]]) -> Optional[List[bool]]:
    """Return a model as a list indexed by variable id (index 0 unused), or None.

    Literals are nonzero ints in ``[-nvars, nvars]``.
    """
    value = [0] * (nvars + 1)  # 0 unassigned, 1 true, -1 false
    trail: List[int] = []
    watches: dict = {}
    cls: List[List[int]] = []
    units: List[int] = []

    for c in clauses:
        c = list(dict.fromkeys(c))
        if not c:
            return None
        if len(c) == 1:
            units.append(c[0])
            continue
        if any(-l in c for l in c):
            continue
        idx = len(cls)
        cls.append(c)
        watches.setdefault(c[0], []).append(idx)
        watches.setdefault(c[1], []).append(idx)

    def val(l):
        v = value[l if l > 0 else -l]
        return v if l > 0 else -v

    def assign(l):
        value[l if l > 0 else -l] = 1 if l > 0 else -1
        trail.append(l)

    for u in units:
        vu = val(u)
        if vu == -1:
            return None
        if vu == 0:
            assign(u)

    def propagate(qhead):
        while qhead < len(trail):
            false_lit = -trail[qhead]
            qhead += 1
            ws = watches.get(false_lit)
            if not ws:
                continue
            keep = []
            i = 0
            n = len(ws)
            conflict = False
            while i < n:
                ci = ws[i]
                i += 1
                c = cls[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                other = c[0]
                if val(other) == 1:
                    keep.append(ci)
                    continue
                moved = False
                for k in range(2, len(c)):
                    if val(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                vo = val(other)
                if vo == -1:
                    conflict = True
                    keep.extend(ws[i:])
                    break
                if vo == 0:
                    assign(other)
            watches[false_lit] = keep
            if conflict:
                return -1
        return qhead

    qhead = propagate(0)
    if qhead < 0:
        return None

    # static branching order: most frequent variables first
    freq = [0] * (nvars + 1)
    for c in cls:
        for l in c:
            freq[abs(l)] += 1
    order = sorted(range(1, nvars + 1), key=lambda v: (-freq[v], v))
    pos = 0
    decisions = []  # (trail length before, literal, flipped, order position)

    while True:
        while pos < len(order) and value[order[pos]] != 0:
            pos += 1
        if pos == len(order):
            return [v == 1 for v in value]
        v = order[pos]
        decisions.append((len(trail), v, False, pos))
        assign(v)
        qhead = propagate(len(trail) - 1)
        while qhead < 0:
            # backtrack to the most recent unflipped decision
            while decisions and decisions[-1][2]:
                decisions.pop()
            if not decisions:
                return None
            tlen, lit, _, p = decisions.pop()
            for l in trail[tlen:]:
                value[abs(l)] = 0
            del trail[tlen:]
            pos = p
            decisions.append((tlen, -lit, True, p))
            assign(-lit)
            qhead = propagate(len(trail) - 1)
