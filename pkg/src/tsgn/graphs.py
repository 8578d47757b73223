"""Immutable transaction-graph data model shared by every other module.

A transaction graph is an ego-network around a target account: nodes are
addresses, edges are individual transfers carrying an amount and an optional
integer timestamp. Instances are frozen after construction so they can be
shared read-only across worker threads; every operation in this module is a
pure function of its input graph.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from functools import cached_property
from typing import Iterable

TIERS = ("plain", "directed", "multiedge")


def _as_amount(value) -> Decimal:
    """Normalize an amount to Decimal; floats go through str() so 0.05 stays 0.05."""
    if isinstance(value, Decimal):
        return value
    if isinstance(value, float):
        return Decimal(str(value))
    return Decimal(value)


@dataclass(frozen=True)
class EdgeRecord:
    """One raw transaction: ``src`` transfers ``amount`` to ``dst``.

    Amounts are kept as Decimal (bit-exact w.r.t. the source export) until the
    transform/feature layer converts them to float. ``amount`` may be 0 for a
    contract invocation. ``edge_id`` is the ordinal of the record within its
    graph and is what the subgraph mappings use as node identity.
    """

    src: str
    dst: str
    amount: Decimal
    timestamp: int | None = None
    edge_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "amount", _as_amount(self.amount))


@dataclass(frozen=True)
class TransactionGraph:
    """Ego-network of one target account.

    ``nodes`` is sorted and duplicate-free and ``edges`` is ordered by
    edge_id; both orderings exist to make downstream output deterministic.
    The three attribute flags say which edge attributes are meaningful:
    direction, timestamps, and whether parallel records are allowed.
    """

    nodes: tuple[str, ...]
    edges: tuple[EdgeRecord, ...]
    center: str
    directed: bool = True
    temporal: bool = False
    multiedge: bool = False
    label: str | None = None

    @classmethod
    def build(
        cls,
        edges: Iterable[EdgeRecord | tuple],
        center: str,
        *,
        directed: bool = True,
        temporal: bool = False,
        multiedge: bool = False,
        label: str | None = None,
    ) -> "TransactionGraph":
        """Assemble a graph from records or (src, dst, amount[, timestamp]) tuples.

        Edge ids are (re)assigned sequentially in input order and the node set
        is collected from the edge endpoints plus the center.
        """
        records = []
        for i, e in enumerate(edges):
            if isinstance(e, EdgeRecord):
                records.append(replace(e, edge_id=i))
            else:
                src, dst, amount = e[0], e[1], e[2]
                ts = e[3] if len(e) > 3 else None
                records.append(EdgeRecord(src, dst, amount, ts, i))
        nodes = {center}
        for r in records:
            nodes.add(r.src)
            nodes.add(r.dst)
        return cls(
            nodes=tuple(sorted(nodes)),
            edges=tuple(records),
            center=center,
            directed=directed,
            temporal=temporal,
            multiedge=multiedge,
            label=label,
        )

    @cached_property
    def node_set(self) -> frozenset[str]:
        return frozenset(self.nodes)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def with_label(self, label: str | None) -> "TransactionGraph":
        return replace(self, label=label)


def _heaviest(records: list[EdgeRecord]) -> EdgeRecord:
    # Collapse winner: largest amount; ties go to the earliest edge_id.
    return max(records, key=lambda r: (r.amount, -r.edge_id))


def undirected_projection(g: TransactionGraph) -> TransactionGraph:
    """Drop the direction attribute, keeping one weighted edge per address pair.

    Parallel and anti-parallel records collapse to the record with the largest
    amount. Endpoints are stored in sorted order, edge ids are renumbered in
    sorted-pair order, and the node set is preserved. Projecting an already
    plain graph returns it unchanged, so the operation is idempotent.
    """
    if not g.directed and not g.multiedge:
        return g
    groups: dict[tuple[str, str], list[EdgeRecord]] = {}
    for r in g.edges:
        key = (r.src, r.dst) if r.src <= r.dst else (r.dst, r.src)
        groups.setdefault(key, []).append(r)
    records = []
    for i, key in enumerate(sorted(groups)):
        winner = _heaviest(groups[key])
        records.append(EdgeRecord(key[0], key[1], winner.amount, winner.timestamp, i))
    return TransactionGraph(
        nodes=g.nodes,
        edges=tuple(records),
        center=g.center,
        directed=False,
        temporal=g.temporal and all(r.timestamp is not None for r in records),
        multiedge=False,
        label=g.label,
    )


def at_tier(g: TransactionGraph, tier: str) -> TransactionGraph:
    """Re-express a graph at an attribute tier.

    plain     -> weight only (undirected simple projection, temporal flag off)
    directed  -> weight + direction (parallel same-direction records collapsed)
    multiedge -> weight + direction + timestamp, parallel records kept

    Direction cannot be recovered once dropped, so plain input only supports
    the plain tier.
    """
    if tier not in TIERS:
        raise ValueError(f"unknown tier {tier!r}; expected one of {TIERS}")
    if tier == "plain":
        return replace(undirected_projection(g), temporal=False)
    if not g.directed:
        raise ValueError(f"tier {tier!r} needs directed data but the graph is undirected")
    if tier == "directed":
        if not g.multiedge:
            return g
        groups: dict[tuple[str, str], list[EdgeRecord]] = {}
        for r in g.edges:
            groups.setdefault((r.src, r.dst), []).append(r)
        records = []
        for i, key in enumerate(sorted(groups)):
            winner = _heaviest(groups[key])
            records.append(EdgeRecord(key[0], key[1], winner.amount, winner.timestamp, i))
        return TransactionGraph(
            nodes=g.nodes,
            edges=tuple(records),
            center=g.center,
            directed=True,
            temporal=all(r.timestamp is not None for r in records),
            multiedge=False,
            label=g.label,
        )
    return replace(g, multiedge=True, temporal=all(r.timestamp is not None for r in g.edges))


def validate(g: TransactionGraph) -> list[str]:
    """Check every structural invariant; returns one message per violation.

    Diagnostic only — an empty list means the graph is well formed.
    """
    problems: list[str] = []
    node_set = set(g.nodes)
    for node in g.nodes:
        if not node:
            problems.append("empty address in node set")
    if g.center not in node_set:
        problems.append(f"center {g.center!r} not in node set")
    seen_ids: set[int] = set()
    seen_pairs: set[tuple[str, str]] = set()
    for r in g.edges:
        tag = f"edge {r.edge_id} ({r.src}->{r.dst})"
        if r.src not in node_set:
            problems.append(f"{tag}: src not in node set")
        if r.dst not in node_set:
            problems.append(f"{tag}: dst not in node set")
        if r.amount < 0:
            problems.append(f"{tag}: negative amount {r.amount}")
        if r.src == r.dst:
            problems.append(f"{tag}: self-loop")
        if r.edge_id in seen_ids:
            problems.append(f"{tag}: duplicate edge_id")
        seen_ids.add(r.edge_id)
        if g.temporal and r.timestamp is None:
            problems.append(f"{tag}: temporal graph but timestamp missing")
        if not g.multiedge:
            key = (r.src, r.dst)
            if not g.directed and r.dst < r.src:
                key = (r.dst, r.src)
            if key in seen_pairs:
                problems.append(f"{tag}: parallel edge in a simple graph")
            seen_pairs.add(key)
    return problems
