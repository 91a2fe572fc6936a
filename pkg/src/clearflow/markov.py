"""Linear-algebraic and graph kernel behind the clearing solvers.

Restriction of the proportion matrix to a bank subset, transience testing by
graph reachability, exact fundamental-matrix solves, the active-set closure,
the decomposition of nonactive banks (absorbing / transient / swamps), and
invariant distributions of swamps.

All systems are desk-scale (a handful of banks), so solves are plain Gaussian
elimination over the network's scalar type; in rational mode every result is
exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (
    EmptySetError,
    IndexOutOfRangeError,
    NegativeInputError,
    NotErgodicError,
    SingularSystemError,
    ZeroDebtInSwampError,
)
from .network import FinancialNetwork
from .scalars import Scalar

Matrix = tuple[tuple[Scalar, ...], ...]


@dataclass(frozen=True)
class SubMatrix:
    """Restriction of a row-stochastic matrix to an ordered bank subset."""

    parent: Matrix
    index: tuple[int, ...]
    entries: Matrix

    @property
    def size(self) -> int:
        return len(self.index)


@dataclass(frozen=True)
class SwampDecomposition:
    """Partition of the banks induced by an active set.

    `swamps` are the closed, strongly connected groups of zero-cash indebted
    banks that owe only each other; they are the sole source of multiple
    clearing vectors. `transient` holds the remaining nonactive indebted
    banks (their flow can escape), `nonactive_absorbing` the nonactive banks
    with no debt at all.
    """

    active: frozenset[int]
    nonactive_absorbing: frozenset[int]
    transient: frozenset[int]
    swamps: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class InvariantDistribution:
    """Probability vector fixed by the transposed restriction of a swamp."""

    support: tuple[int, ...]
    weights: tuple[Scalar, ...]


def restrict(matrix: Sequence[Sequence[Scalar]], banks: Sequence[int]) -> SubMatrix:
    """Keep only the rows and columns of `banks`, preserving their order."""
    index = tuple(banks)
    if not index:
        raise EmptySetError("cannot restrict to an empty bank set")
    n = len(matrix)
    seen: set[int] = set()
    for b in index:
        if not 0 <= b < n:
            raise IndexOutOfRangeError(f"bank index {b} outside 0..{n - 1}")
        if b in seen:
            raise IndexOutOfRangeError(f"bank index {b} repeated in restriction")
        seen.add(b)
    parent = tuple(tuple(row) for row in matrix)
    entries = tuple(tuple(parent[r][s] for s in index) for r in index)
    return SubMatrix(parent=parent, index=index, entries=entries)


def is_transient(sub: SubMatrix) -> bool:
    """True iff every state of the subset can reach the outside world.

    Graph test on positive entries of the parent: a state escapes if some
    path inside the subset ends in a state with a positive entry leaving the
    subset. Equivalent to invertibility of (I - Q_B) but exact and cheap in
    both scalar modes.
    """
    inside = set(sub.index)
    exits = set()
    for r, bank in enumerate(sub.index):
        row = sub.parent[bank]
        if any(row[j] > 0 for j in range(len(row)) if j not in inside):
            exits.add(r)
    # walk the subset graph backwards from the exit-capable states
    preds: dict[int, list[int]] = {r: [] for r in range(sub.size)}
    for r in range(sub.size):
        for s in range(sub.size):
            if r != s and sub.entries[r][s] > 0:
                preds[s].append(r)
        # a positive self-entry never helps escape, so it is ignored
    reached = set(exits)
    stack = list(exits)
    while stack:
        s = stack.pop()
        for r in preds[s]:
            if r not in reached:
                reached.add(r)
                stack.append(r)
    return len(reached) == sub.size


def solve_linear(rows: list[list[Scalar]], rhs: list[Scalar]) -> list[Scalar]:
    """Gaussian elimination with partial pivoting; exact on Fractions."""
    m = len(rows)
    a = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(m):
        pivot = max(range(col, m), key=lambda r: abs(a[r][col]))
        if a[pivot][col] == 0:
            raise SingularSystemError("linear system is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        for r in range(m):
            if r == col or a[r][col] == 0:
                continue
            factor = a[r][col] / inv
            for c in range(col, m + 1):
                a[r][c] -= factor * a[col][c]
    return [a[i][m] / a[i][i] for i in range(m)]


def fundamental_solve(sub: SubMatrix, e: Sequence[Scalar]) -> list[Scalar]:
    """Unique solution of v = e + Q_B^T v for a transient restriction.

    The input must be componentwise nonnegative; the solution then is as
    well (it is the transposed fundamental matrix applied to e).
    """
    if len(e) != sub.size:
        raise IndexOutOfRangeError(f"input vector has length {len(e)}, expected {sub.size}")
    if any(x < 0 for x in e):
        raise NegativeInputError("input vector must be nonnegative")
    if not is_transient(sub):
        raise SingularSystemError("restriction is not transient; no unique solution")
    m = sub.size
    # rows of (I - Q_B^T): entry (i, j) = delta_ij - q[ j ][ i ]
    rows = [
        [(1 if i == j else 0) - sub.entries[j][i] for j in range(m)]
        for i in range(m)
    ]
    v = solve_linear(rows, list(e))
    return v


def active_set(net: FinancialNetwork) -> frozenset[int]:
    """Banks that move money: positive-cash banks plus, transitively, every
    creditor of an already active debtor."""
    tol = net.zero_tol
    frontier = [i for i in range(net.n) if net.cash[i] > tol]
    active = set(frontier)
    while frontier:
        i = frontier.pop()
        for j in range(net.n):
            if j not in active and net.liabilities[i][j] > 0:
                active.add(j)
                frontier.append(j)
    return frozenset(active)


def _strongly_connected_components(nodes: list[int], edges: dict[int, list[int]]) -> list[list[int]]:
    """Iterative Tarjan over an adjacency dict; returns components as lists."""
    index_counter = 0
    stack: list[int] = []
    lowlink: dict[int, int] = {}
    index: dict[int, int] = {}
    on_stack: set[int] = set()
    components: list[list[int]] = []

    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, edge_pos = work[-1]
            if edge_pos == 0:
                index[node] = index_counter
                lowlink[node] = index_counter
                index_counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            succs = edges.get(node, [])
            while edge_pos < len(succs):
                succ = succs[edge_pos]
                edge_pos += 1
                if succ not in index:
                    work[-1] = (node, edge_pos)
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if advanced:
                continue
            if lowlink[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == node:
                        break
                components.append(component)
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return components


def closed_classes(net: FinancialNetwork, banks: set[int]) -> list[tuple[int, ...]]:
    """Strongly connected groups within `banks` that have no debt edge leaving
    the group at all (so money can only circulate inside)."""
    nodes = sorted(banks)
    edges = {
        i: [j for j in nodes if j != i and net.liabilities[i][j] > 0]
        for i in nodes
    }
    result = []
    for comp in _strongly_connected_components(nodes, edges):
        members = set(comp)
        # closed means no debt edge from any member to anywhere outside the
        # group; indebted singletons can never be closed (no self-debt)
        closed = all(
            net.liabilities[i][j] == 0
            for i in comp
            for j in range(net.n)
            if j not in members
        )
        if closed:
            result.append(tuple(sorted(comp)))
    return result


def decompose_nonactive(net: FinancialNetwork, active: frozenset[int]) -> SwampDecomposition:
    """Split the nonactive banks into debt-free, transient, and swamps."""
    tol = net.zero_tol
    nonactive = set(range(net.n)) - set(active)
    absorbing = {i for i in nonactive if net.total_debt[i] <= tol}
    indebted = nonactive - absorbing
    swamps = [s for s in closed_classes(net, indebted) if s]
    swamp_members = {i for s in swamps for i in s}
    transient = indebted - swamp_members
    return SwampDecomposition(
        active=frozenset(active),
        nonactive_absorbing=frozenset(absorbing),
        transient=frozenset(transient),
        swamps=tuple(sorted(swamps)),
    )


def invariant_distribution(sub: SubMatrix) -> InvariantDistribution:
    """Unique probability vector pi with pi = Q_B^T pi for an ergodic restriction."""
    inside = set(sub.index)
    for bank in sub.index:
        row = sub.parent[bank]
        if any(row[j] > 0 for j in range(len(row)) if j not in inside):
            raise NotErgodicError(f"bank {bank} has flow leaving the set")
    m = sub.size
    if m > 1:
        edges = {
            r: [s for s in range(m) if s != r and sub.entries[r][s] > 0]
            for r in range(m)
        }
        comps = _strongly_connected_components(list(range(m)), edges)
        if len(comps) != 1:
            raise NotErgodicError("set is not a single communicating class")
    # (I - Q_B^T) pi = 0 with the last equation replaced by sum(pi) = 1
    one = sub.entries[0][0] * 0 + 1  # scalar one in the matrix's own type
    rows = [
        [(one if r == s else one * 0) - sub.entries[s][r] for s in range(m)]
        for r in range(m)
    ]
    rows[m - 1] = [one] * m
    rhs = [one * 0] * (m - 1) + [one]
    weights = solve_linear(rows, rhs)
    if any(w <= 0 for w in weights):
        raise NotErgodicError("invariant distribution is not strictly positive")
    return InvariantDistribution(support=sub.index, weights=tuple(weights))


def swamp_solution(dist: InvariantDistribution, total_debt: Sequence[Scalar]) -> list[Scalar]:
    """Largest multiple of the invariant distribution that respects all debts.

    Returns m * pi over the support, where m = min_i debt_i / pi_i; at least
    one debt constraint binds, and the vector (extended by zeros) is fixed by
    the transposed proportion matrix.
    """
    debts = [total_debt[i] for i in dist.support]
    if any(b <= 0 for b in debts):
        raise ZeroDebtInSwampError("every swamp member must carry positive debt")
    m = min(b / w for b, w in zip(debts, dist.weights))
    return [m * w for w in dist.weights]
