"""Wavelength assignment for an N-port passive router built from N multiplexers.

Every multiplexer is a vertex of the complete graph K_N, every fiber between
two demultiplexing ports is an edge, and the wavelength carried on that fiber
is the edge's color. A usable router needs a proper edge coloring: the
wavelengths leaving one multiplexer must all differ, otherwise the device
could not tell two destinations apart.

Nodes are 0-based integers internally and shown as letters (A, B, ...).
Wavelengths are 1-based channel labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidNodeError, InvalidSizeError, SelfLinkError

UNASSIGNED = -1

DUPLICATE_AT_VERTEX = "duplicate-at-vertex"
ASYMMETRY = "asymmetry"
MISSING_PAIR = "missing-pair"
BAD_COLOR_RANGE = "bad-color-range"


def node_label(index: int) -> str:
    """Spreadsheet-style letters: 0 -> A, 25 -> Z, 26 -> AA."""
    if index < 0:
        raise InvalidNodeError(f"negative node index {index}")
    label = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        label = chr(ord("A") + rem) + label
    return label


def parse_node(label) -> int:
    """Inverse of :func:`node_label`; plain integers pass through."""
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        return int(label)
    text = str(label).strip().upper()
    if not text or not text.isalpha() or not text.isascii():
        raise InvalidNodeError(f"bad node label {label!r}")
    index = 0
    for ch in text:
        index = index * 26 + (ord(ch) - ord("A") + 1)
    return index - 1


def color_count_for(n: int) -> int:
    """Chromatic index of K_n: n - 1 for even n, n for odd n."""
    if n < 2:
        raise InvalidSizeError(f"a router needs at least 2 ports, got {n}")
    return n - 1 if n % 2 == 0 else n


def demux_port_count(n: int) -> int:
    """Demultiplexing ports each multiplexer needs to realize the wiring.

    With odd n one port per multiplexer stays idle.
    """
    return color_count_for(n)


@dataclass(frozen=True, eq=False)
class WiringPlan:
    """Symmetric node-pair -> wavelength table.

    ``table`` is an n x n int array; entry ``[u, v]`` is the wavelength
    linking u and v, and ``UNASSIGNED`` marks the diagonal and missing pairs.
    The array is made read-only on construction.
    """

    n_nodes: int
    color_count: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64, copy=True)
        if table.shape != (self.n_nodes, self.n_nodes):
            raise InvalidSizeError(
                f"table shape {table.shape} does not match n_nodes={self.n_nodes}")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_matrix(cls, rows, color_count=None) -> "WiringPlan":
        """Build a plan from a full square matrix (``None`` = unassigned).

        No validation is done beyond the shape; use :func:`verify_plan`.
        """
        n = len(rows)
        table = np.full((n, n), UNASSIGNED, dtype=np.int64)
        for u, row in enumerate(rows):
            if len(row) != n:
                raise InvalidSizeError(f"row {u} has {len(row)} entries, expected {n}")
            for v, value in enumerate(row):
                if value is not None:
                    table[u, v] = value
        if color_count is None:
            color_count = color_count_for(n)
        return cls(n, color_count, table)

    def __eq__(self, other):
        if not isinstance(other, WiringPlan):
            return NotImplemented
        return (self.n_nodes == other.n_nodes
                and self.color_count == other.color_count
                and np.array_equal(self.table, other.table))

    __hash__ = None

    def pairs(self):
        """Unordered node pairs (u < v) in row-major order."""
        for u in range(self.n_nodes):
            for v in range(u + 1, self.n_nodes):
                yield u, v

    def upper_triangle(self) -> list[list[int | None]]:
        rows = []
        for u in range(self.n_nodes):
            rows.append([None if x == UNASSIGNED else int(x)
                         for x in self.table[u, u + 1:]])
        return rows


def build_plan(n: int) -> WiringPlan:
    """Construct the diagonal-filling wiring for an n-port router.

    Odd n: ``table(u, v) = ((u + v) mod n) + 1``. Even n: the first n - 1
    nodes use the odd rule with modulus n - 1 and the last node copies the
    diagonal of that table, ``table(u, n-1) = (2u mod (n-1)) + 1``.
    """
    colors = color_count_for(n)
    if n % 2:
        idx = np.arange(n, dtype=np.int64)
        table = (idx[:, None] + idx[None, :]) % n + 1
    else:
        m = n - 1
        idx = np.arange(m, dtype=np.int64)
        table = np.empty((n, n), dtype=np.int64)
        table[:m, :m] = (idx[:, None] + idx[None, :]) % m + 1
        last = (2 * idx) % m + 1
        table[:m, m] = last
        table[m, :m] = last
    np.fill_diagonal(table, UNASSIGNED)
    return WiringPlan(n, colors, table)


@dataclass(frozen=True)
class Violation:
    kind: str
    nodes: tuple
    detail: str = ""

    def describe(self) -> str:
        names = ",".join(node_label(u) for u in self.nodes)
        text = f"{self.kind} [{names}]"
        return f"{text} {self.detail}" if self.detail else text


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def verify_plan(plan: WiringPlan) -> VerificationReport:
    """Exhaustively check every invariant a router wiring must satisfy.

    Looks only at the table contents, never at how the plan was produced.
    Violations come out in a fixed order: color count, diagonal, missing
    pairs, asymmetry, out-of-range colors, then per-vertex duplicates.
    """
    n = plan.n_nodes
    t = plan.table
    found = []

    if n < 2:
        found.append(Violation(BAD_COLOR_RANGE, (), f"plan has {n} node(s)"))
        return VerificationReport(tuple(found))
    expected = color_count_for(n)
    if plan.color_count != expected:
        found.append(Violation(
            BAD_COLOR_RANGE, (),
            f"declares {plan.color_count} colors, K_{n} needs exactly {expected}"))

    for u in np.flatnonzero(np.diagonal(t) != UNASSIGNED):
        found.append(Violation(BAD_COLOR_RANGE, (int(u),), "self-link assigned"))

    off = ~np.eye(n, dtype=bool)
    iu, iv = np.triu_indices(n, k=1)
    upper, lower = t[iu, iv], t[iv, iu]

    missing = (upper == UNASSIGNED) | (lower == UNASSIGNED)
    for u, v in zip(iu[missing], iv[missing]):
        found.append(Violation(MISSING_PAIR, (int(u), int(v))))

    asym = ~missing & (upper != lower)
    for u, v in zip(iu[asym], iv[asym]):
        found.append(Violation(
            ASYMMETRY, (int(u), int(v)),
            f"{int(t[u, v])} vs {int(t[v, u])}"))

    bad = off & (t != UNASSIGNED) & ((t < 1) | (t > plan.color_count))
    for u, v in zip(*np.nonzero(bad)):
        found.append(Violation(
            BAD_COLOR_RANGE, (int(u), int(v)),
            f"wavelength {int(t[u, v])} outside 1..{plan.color_count}"))

    # Duplicates per row: sort assigned colors and look for equal neighbours.
    masked = np.where(off & (t != UNASSIGNED), t, UNASSIGNED)
    ordered = np.sort(masked, axis=1)
    dup = (ordered[:, 1:] == ordered[:, :-1]) & (ordered[:, 1:] != UNASSIGNED)
    for u in np.flatnonzero(dup.any(axis=1)):
        colors = sorted(set(int(c) for c in ordered[u, 1:][dup[u]]))
        for c in colors:
            partners = tuple(int(v) for v in np.flatnonzero(masked[u] == c))
            found.append(Violation(
                DUPLICATE_AT_VERTEX, (int(u),) + partners,
                f"wavelength {c} used {len(partners)} times"))

    return VerificationReport(tuple(found))


def _check_node(plan: WiringPlan, u) -> int:
    u = parse_node(u)
    if not 0 <= u < plan.n_nodes:
        raise InvalidNodeError(f"node {u} outside 0..{plan.n_nodes - 1}")
    return u


def wavelength_for(plan: WiringPlan, u, v) -> int:
    u, v = _check_node(plan, u), _check_node(plan, v)
    if u == v:
        raise SelfLinkError(f"no self-link at node {node_label(u)}")
    value = int(plan.table[u, v])
    if value == UNASSIGNED:
        raise InvalidNodeError(
            f"pair {node_label(u)}-{node_label(v)} has no wavelength")
    return value


def route(plan: WiringPlan, ingress, wavelength: int) -> int | None:
    """Node reached from ``ingress`` on ``wavelength``, or None if that port is idle."""
    u = _check_node(plan, ingress)
    row = plan.table[u]
    hits = np.flatnonzero(row == wavelength)
    hits = hits[hits != u]
    if len(hits) != 1:
        return None
    return int(hits[0])


def missing_colors(plan: WiringPlan, u) -> list[int]:
    """Wavelengths in 1..color_count not used at node u (one per node for odd n)."""
    u = _check_node(plan, u)
    used = set(int(c) for c in plan.table[u] if c != UNASSIGNED)
    return [c for c in range(1, plan.color_count + 1) if c not in used]
