"""Conditional preference networks for providers' temporal preferences.

A provider's willingness to serve particular time slots is captured as a
CP-net: a DAG of attributes (e.g. Day, TimeSlot) annotated with conditional
preference tables.  Each CPT row gives a strict total order over one
attribute's domain for one assignment of its parents.  The induced graph
over complete outcomes (one value per attribute) has a worsening-flip edge
wherever two outcomes differ in a single attribute and the relevant CPT row
prefers one value to the other; chains of worsening flips define dominance.

The induced order is generally partial, while the reward formula needs a
total rank per slot.  ``rank_outcomes`` therefore linearizes the induced
graph topologically, breaking ties between incomparable outcomes
lexicographically by attribute values (domain declaration order), and
``to_ptp`` turns the ranked outcomes into a provider's slot preference list.

Outcomes are plain tuples of value labels in attribute declaration order.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field

from .model import ProviderTemporalPreferences

Outcome = tuple[str, ...]

#: Default ceiling on the outcome-space size accepted by ``rank_outcomes``.
#: Dominance reasoning is exponential in attribute count; this keeps it at
#: desk scale.
DEFAULT_OUTCOME_CAP = 4096


@dataclass(frozen=True, eq=False)
class CPNet:
    """A CP-net: ordered attributes, parent DAG, and full CPTs.

    ``attributes`` fixes both the outcome component order and each domain's
    value order (used for deterministic tie-breaking).  ``cpts[name]`` maps
    a tuple of parent values (in ``parents[name]`` order) to a strict total
    order over the attribute's domain, most preferred first.  Attributes
    without parents have a single row keyed by the empty tuple.
    """

    attributes: tuple[tuple[str, tuple[str, ...]], ...]
    parents: dict[str, tuple[str, ...]] = field(default_factory=dict)
    cpts: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = field(default_factory=dict)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.attributes)

    def domain(self, name: str) -> tuple[str, ...]:
        for attr, dom in self.attributes:
            if attr == name:
                return dom
        raise KeyError(name)

    def parents_of(self, name: str) -> tuple[str, ...]:
        return self.parents.get(name, ())

    def outcome_count(self) -> int:
        count = 1
        for _, dom in self.attributes:
            count *= len(dom)
        return count

    def outcomes(self):
        """All complete outcomes, lexicographic in domain declaration order."""
        return itertools.product(*(dom for _, dom in self.attributes))


def validate(net: CPNet) -> list[str]:
    """Check structural soundness; returns one message per violation.

    Verifies that parents are declared attributes and form a DAG, that every
    attribute has exactly one CPT row per complete parent assignment, and
    that every row is a strict total order over the full domain.
    """
    problems: list[str] = []
    names = net.names
    if len(set(names)) != len(names):
        problems.append("duplicate attribute names")
        return problems
    name_set = set(names)
    for name, dom in net.attributes:
        if not dom:
            problems.append(f"attribute {name}: empty domain")
        if len(set(dom)) != len(dom):
            problems.append(f"attribute {name}: duplicate domain values")

    for name, pars in net.parents.items():
        if name not in name_set:
            problems.append(f"parents declared for unknown attribute {name}")
            continue
        for p in pars:
            if p not in name_set:
                problems.append(f"attribute {name}: unknown parent {p}")
        if len(set(pars)) != len(pars):
            problems.append(f"attribute {name}: duplicate parents")

    # Cycle check over the parent relation (edges parent -> child).
    state: dict[str, int] = {}

    def has_cycle(node: str) -> bool:
        state[node] = 1
        for p in net.parents_of(node):
            if p not in name_set:
                continue
            mark = state.get(p, 0)
            if mark == 1 or (mark == 0 and has_cycle(p)):
                return True
        state[node] = 2
        return False

    for name in names:
        if state.get(name, 0) == 0 and has_cycle(name):
            problems.append(f"cycle in parent graph involving {name}")
            return problems

    for name, dom in net.attributes:
        pars = net.parents_of(name)
        if any(p not in name_set for p in pars):
            continue
        table = net.cpts.get(name)
        if table is None:
            problems.append(f"attribute {name}: missing CPT")
            continue
        expected = set(itertools.product(*(net.domain(p) for p in pars)))
        for key in table:
            if key not in expected:
                problems.append(f"attribute {name}: CPT row for invalid condition {key}")
        for key in sorted(expected):
            row = table.get(key)
            if row is None:
                problems.append(f"attribute {name}: missing CPT row for condition {key}")
            elif sorted(row) != sorted(dom):
                problems.append(
                    f"attribute {name}: CPT row {key} is not a strict total order "
                    f"over {dom}, got {row}"
                )
    return problems


def require_valid(net: CPNet) -> None:
    problems = validate(net)
    if problems:
        raise ValueError("invalid CP-net: " + "; ".join(problems))


def _check_outcome(net: CPNet, outcome: Outcome) -> None:
    if len(outcome) != len(net.attributes):
        raise ValueError(
            f"outcome {outcome} has {len(outcome)} components, "
            f"net has {len(net.attributes)} attributes"
        )
    for value, (name, dom) in zip(outcome, net.attributes):
        if value not in dom:
            raise ValueError(f"outcome value {value!r} not in domain of {name}")


def _row_for(net: CPNet, outcome: Outcome, attr_pos: int) -> tuple[str, ...]:
    """CPT row governing attribute ``attr_pos`` under ``outcome``'s parent values."""
    name = net.attributes[attr_pos][0]
    pos = {n: i for i, n in enumerate(net.names)}
    key = tuple(outcome[pos[p]] for p in net.parents_of(name))
    return net.cpts[name][key]


def _worsening_flips(net: CPNet, outcome: Outcome):
    """Yield outcomes one worsening flip away from ``outcome``."""
    for a, (name, _) in enumerate(net.attributes):
        row = _row_for(net, outcome, a)
        current = row.index(outcome[a])
        for worse in row[current + 1 :]:
            yield outcome[:a] + (worse,) + outcome[a + 1 :]


def optimal_outcome(net: CPNet) -> Outcome:
    """Sweep attributes parents-first, picking each CPT-best value."""
    require_valid(net)
    order: list[str] = []
    placed: set[str] = set()
    remaining = list(net.names)
    while remaining:
        for name in remaining:
            if all(p in placed for p in net.parents_of(name)):
                order.append(name)
                placed.add(name)
                remaining.remove(name)
                break
    chosen: dict[str, str] = {}
    for name in order:
        key = tuple(chosen[p] for p in net.parents_of(name))
        chosen[name] = net.cpts[name][key][0]
    return tuple(chosen[name] for name in net.names)


def dominates(net: CPNet, better: Outcome, worse: Outcome) -> bool:
    """True iff a chain of worsening flips leads from ``better`` to ``worse``.

    Breadth-first search over the outcome space; exponential in attribute
    count, intended as the desk-scale dominance oracle.
    """
    require_valid(net)
    _check_outcome(net, better)
    _check_outcome(net, worse)
    if better == worse:
        return False
    seen = {better}
    queue = deque([better])
    while queue:
        for nxt in _worsening_flips(net, queue.popleft()):
            if nxt == worse:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def rank_outcomes(net: CPNet, cap: int = DEFAULT_OUTCOME_CAP) -> list[tuple[Outcome, int]]:
    """Totally rank all outcomes, 1 = most preferred.

    Topological linearization of the induced worsening-flip graph.  Among
    outcomes whose predecessors are all ranked, the lexicographically
    smallest (by per-attribute domain position) is ranked next, so the
    result is deterministic and a linear extension of dominance.
    """
    require_valid(net)
    count = net.outcome_count()
    if count > cap:
        raise ValueError(f"outcome space has {count} outcomes, exceeding the cap of {cap}")

    dom_pos = [
        {v: i for i, v in enumerate(dom)} for _, dom in net.attributes
    ]

    def lex_key(outcome: Outcome) -> tuple[int, ...]:
        return tuple(dom_pos[a][v] for a, v in enumerate(outcome))

    outcomes = list(net.outcomes())
    indegree: dict[Outcome, int] = {o: 0 for o in outcomes}
    successors: dict[Outcome, list[Outcome]] = {o: [] for o in outcomes}
    for o in outcomes:
        for worse in _worsening_flips(net, o):
            successors[o].append(worse)
            indegree[worse] += 1

    ready = [lex_key(o) + (o,) for o in outcomes if indegree[o] == 0]
    heapq.heapify(ready)
    ranked: list[tuple[Outcome, int]] = []
    while ready:
        o = heapq.heappop(ready)[-1]
        ranked.append((o, len(ranked) + 1))
        for worse in successors[o]:
            indegree[worse] -= 1
            if indegree[worse] == 0:
                heapq.heappush(ready, lex_key(worse) + (worse,))
    if len(ranked) != count:  # pragma: no cover - valid nets induce acyclic graphs
        raise ValueError("induced preference graph is cyclic; net is inconsistent")
    return ranked


@dataclass(frozen=True, eq=False)
class OutcomeSlotMap:
    """Maps outcomes to horizon slot indices.

    The default ``grid`` form lays outcomes out row-major over the attribute
    domains (for the usual Day x TimeSlot nets:
    ``slot = day_index * slots_per_day + slot_of_day``).  The ``explicit``
    form enumerates outcome-to-slot pairs; outcomes it omits are dropped
    from the provider's preference list.
    """

    dims: tuple[int, ...] | None = None
    explicit: dict[Outcome, int] | None = None

    def __post_init__(self):
        if (self.dims is None) == (self.explicit is None):
            raise ValueError("exactly one of dims or explicit must be given")

    @staticmethod
    def grid(*dims: int) -> "OutcomeSlotMap":
        return OutcomeSlotMap(dims=tuple(dims))

    def slot_of(self, net: CPNet, outcome: Outcome) -> int | None:
        if self.explicit is not None:
            return self.explicit.get(outcome)
        dims = self.dims
        sizes = tuple(len(dom) for _, dom in net.attributes)
        if dims != sizes:
            raise ValueError(f"grid dims {dims} do not match attribute domain sizes {sizes}")
        slot = 0
        for a, (_, dom) in enumerate(net.attributes):
            slot = slot * dims[a] + dom.index(outcome[a])
        return slot


def to_ptp(net: CPNet, slot_map: OutcomeSlotMap, pid: str) -> ProviderTemporalPreferences:
    """Rank the net's outcomes and project them onto time slots.

    Outcomes the map does not cover are dropped and the remaining ranks are
    re-compacted to 1..k; two ranked outcomes mapping to one slot is an
    error.
    """
    prefs: list[tuple[int, int]] = []
    seen: dict[int, Outcome] = {}
    next_rank = 1
    for outcome, _ in rank_outcomes(net):
        slot = slot_map.slot_of(net, outcome)
        if slot is None:
            continue
        if slot in seen:
            raise ValueError(
                f"outcomes {seen[slot]} and {outcome} both map to slot {slot}"
            )
        seen[slot] = outcome
        prefs.append((slot, next_rank))
        next_rank += 1
    return ProviderTemporalPreferences(pid=pid, prefs=tuple(prefs))


@dataclass(frozen=True, eq=False)
class ProviderBlock:
    """One parsed ``provider`` section of a CP-net file."""

    pid: str
    net: CPNet
    slot_map: OutcomeSlotMap


def parse_cpnet_text(text: str) -> list[ProviderBlock]:
    """Parse the line-oriented CP-net format.

    Grammar (one block per provider; ``#`` starts a comment)::

        provider <pid>
        attr <Name>: <v1>,<v2>[,...] [parents <P1>[,<P2>...]]
        cpt <Name> [| <P1>=<val>[,<P2>=<val>...]]: <v_a> > <v_b> [> ...]
        map grid <d1>x<d2>[x...]
        map explicit <v1,v2,...>=<slot> [...]

    Unknown directives are errors.  Each block's net is validated before
    being returned.
    """
    blocks: list[ProviderBlock] = []
    pid: str | None = None
    attributes: list[tuple[str, tuple[str, ...]]] = []
    parents: dict[str, tuple[str, ...]] = {}
    cpts: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
    slot_map: OutcomeSlotMap | None = None

    def flush(where: str) -> None:
        nonlocal pid, attributes, parents, cpts, slot_map
        if pid is None:
            return
        if slot_map is None:
            raise ValueError(f"{where}: provider {pid} block has no map directive")
        net = CPNet(attributes=tuple(attributes), parents=dict(parents), cpts=dict(cpts))
        require_valid(net)
        blocks.append(ProviderBlock(pid=pid, net=net, slot_map=slot_map))
        pid, slot_map = None, None
        attributes, parents, cpts = [], {}, {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        directive, _, rest = line.partition(" ")
        rest = rest.strip()
        if directive == "provider":
            flush(f"line {lineno}")
            if not rest:
                raise ValueError(f"line {lineno}: provider directive needs an id")
            pid = rest
        elif pid is None:
            raise ValueError(f"line {lineno}: {directive!r} before any provider directive")
        elif directive == "attr":
            head, _, domain_part = rest.partition(":")
            name = head.strip()
            if not name or not domain_part.strip():
                raise ValueError(f"line {lineno}: malformed attr directive")
            domain_text, _, parents_part = domain_part.partition(" parents ")
            values = tuple(v.strip() for v in domain_text.split(",") if v.strip())
            if not values:
                raise ValueError(f"line {lineno}: attribute {name} has an empty domain")
            attributes.append((name, values))
            if parents_part.strip():
                parents[name] = tuple(p.strip() for p in parents_part.split(","))
        elif directive == "cpt":
            head, sep, order_part = rest.partition(":")
            if not sep:
                raise ValueError(f"line {lineno}: cpt directive missing ':'")
            name_part, _, cond_part = head.partition("|")
            name = name_part.strip()
            cond: tuple[str, ...] = ()
            if cond_part.strip():
                assigned: dict[str, str] = {}
                for piece in cond_part.split(","):
                    var, eq, val = piece.partition("=")
                    if not eq:
                        raise ValueError(f"line {lineno}: malformed condition {piece.strip()!r}")
                    assigned[var.strip()] = val.strip()
                declared = parents.get(name, ())
                if set(assigned) != set(declared):
                    raise ValueError(
                        f"line {lineno}: condition names {sorted(assigned)} do not match "
                        f"declared parents {list(declared)} of {name}"
                    )
                cond = tuple(assigned[p] for p in declared)
            order = tuple(v.strip() for v in order_part.split(">") if v.strip())
            if len(order) < 1:
                raise ValueError(f"line {lineno}: empty preference order for {name}")
            cpts.setdefault(name, {})
            if cond in cpts[name]:
                raise ValueError(f"line {lineno}: duplicate CPT row for {name} {cond}")
            cpts[name][cond] = order
        elif directive == "map":
            kind, _, spec = rest.partition(" ")
            spec = spec.strip()
            if kind == "grid":
                try:
                    dims = tuple(int(d) for d in spec.split("x"))
                except ValueError:
                    raise ValueError(f"line {lineno}: malformed grid spec {spec!r}") from None
                slot_map = OutcomeSlotMap(dims=dims)
            elif kind == "explicit":
                mapping: dict[Outcome, int] = {}
                for pair in spec.split():
                    outcome_text, eq, slot_text = pair.partition("=")
                    if not eq:
                        raise ValueError(f"line {lineno}: malformed explicit mapping {pair!r}")
                    outcome = tuple(v.strip() for v in outcome_text.split(","))
                    mapping[outcome] = int(slot_text)
                if not mapping:
                    raise ValueError(f"line {lineno}: empty explicit map")
                slot_map = OutcomeSlotMap(explicit=mapping)
            else:
                raise ValueError(f"line {lineno}: unknown map kind {kind!r}")
        else:
            raise ValueError(f"line {lineno}: unknown directive {directive!r}")
    flush("end of file")
    if not blocks:
        raise ValueError("no provider blocks found")
    return blocks


def parse_cpnet_file(path) -> list[ProviderBlock]:
    with open(path, encoding="utf-8") as fh:
        return parse_cpnet_text(fh.read())
