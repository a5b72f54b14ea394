"""Labelled default-rule datasets: text format, group-aware splits, negative synthesis.

One example per line::

    bird & antarctic ~> !flies ; +
    true ~> bird ; - ; group=a17

Blank lines and ``#`` comments are ignored; ``#@key=value`` lines carry
metadata.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

from .logic import Clause, ParseError
from .possibilistic import DefaultRule, LabeledExample


def derive_rng(seed: int, label: str) -> random.Random:
    """Independent stream for one named random task under a global seed."""
    return random.Random(f"{seed}:{label}")


@dataclass
class Dataset:
    examples: List[LabeledExample] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)

    @property
    def vocabulary(self) -> frozenset:
        vs = set()
        for e in self.examples:
            vs |= e.rule.vars
        return frozenset(vs)

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def positives(self) -> List[LabeledExample]:
        return [e for e in self.examples if e.label == 1]

    @property
    def negatives(self) -> List[LabeledExample]:
        return [e for e in self.examples if e.label == -1]


_LABELS = {"+": 1, "-": -1}


def parse_example(line: str) -> LabeledExample:
    parts = [p.strip() for p in line.split(";")]
    if len(parts) not in (2, 3):
        raise ParseError("expected '<rule> ; <label> [; group=<id>]'")
    rule = DefaultRule.parse(parts[0])
    if parts[1] not in _LABELS:
        raise ParseError(f"unknown label {parts[1]!r} (use + or -)")
    group = None
    if len(parts) == 3:
        key, sep, val = parts[2].partition("=")
        if key.strip() != "group" or not sep or not val.strip():
            raise ParseError(f"expected 'group=<id>', got {parts[2]!r}")
        group = val.strip()
    return LabeledExample(rule, _LABELS[parts[1]], group)


def format_example(e: LabeledExample) -> str:
    s = f"{e.rule} ; {'+' if e.label == 1 else '-'}"
    if e.group is not None:
        s += f" ; group={e.group}"
    return s


def parse_dataset(text: str) -> Dataset:
    d = Dataset()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#@"):
            key, sep, val = line[2:].partition("=")
            if not sep:
                raise ParseError(f"line {lineno}: metadata needs '#@key=value'")
            d.metadata[key.strip()] = val.strip()
            continue
        if not line or line.startswith("#"):
            continue
        try:
            d.examples.append(parse_example(line))
        except (ParseError, ValueError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return d


def serialize(d: Dataset) -> str:
    lines = [f"#@{k}={v}" for k, v in sorted(d.metadata.items())]
    lines += [format_example(e) for e in d.examples]
    return "".join(l + "\n" for l in lines)


def read_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh.read())


def write_dataset(path, d: Dataset) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(d))


def split_by_group(d: Dataset, test_fraction: float, rng: random.Random) -> Tuple[Dataset, Dataset]:
    """Whole groups go to one side; test gets the fewest examples reaching the fraction.

    Among group sets with equal example count the one found first in a
    shuffled group order wins, so ``rng`` decides ties.
    """
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    missing = [i for i, e in enumerate(d.examples) if e.group is None]
    if missing:
        raise ValueError(f"{len(missing)} example(s) have no group, e.g. index {missing[0]}")
    sizes: Dict[str, int] = {}
    for e in d.examples:
        sizes[e.group] = sizes.get(e.group, 0) + 1
    if len(sizes) < 2:
        raise ValueError("need at least two groups to split")
    n = len(d.examples)
    target = test_fraction * n
    order = sorted(sizes)
    rng.shuffle(order)
    # subset sums: first-reached group set for every attainable count
    reach: Dict[int, Tuple[str, ...]] = {0: ()}
    for g in order:
        for s, gs in list(reach.items()):
            t = s + sizes[g]
            if t not in reach:
                reach[t] = gs + (g,)
    feasible = [s for s in reach if s >= target and s < n]
    if not feasible:
        raise ValueError("no proper group set reaches the test fraction")
    test_groups = set(reach[min(feasible)])
    meta = dict(d.metadata)
    train = Dataset([e for e in d.examples if e.group not in test_groups], dict(meta))
    test = Dataset([e for e in d.examples if e.group in test_groups], dict(meta))
    return train, test


def synthesize_negatives(positives: Iterable[LabeledExample], consequent_pool: Iterable[Clause],
                         rng: random.Random) -> Dataset:
    """For each positive a ~> b, the negative a ~> b' with b' drawn from pool minus b."""
    pool = sorted(set(consequent_pool), key=Clause.sort_key)
    if len(pool) < 2:
        raise ValueError("consequent pool needs at least two clauses")
    out = []
    for e in positives:
        if e.label != 1:
            raise ValueError(f"not a positive example: {format_example(e)}")
        choices = [c for c in pool if c != e.rule.consequent]
        b2 = rng.choice(choices)
        out.append(LabeledExample(DefaultRule(e.rule.antecedent, b2), -1, e.group))
    return Dataset(out)
