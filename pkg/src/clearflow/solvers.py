"""Alternative clearing algorithms and solution-set analysis.

Three independent routes to a clearing vector live in this package: the
continuous flow (`flow.run_flow`), the fictitious-defaults iteration here,
and plain fixed-point iteration of the clamped payment map. On networks
without swamps all three agree; with swamps the flow and fictitious defaults
produce the least vector while fixed-point iteration started from the debt
vector descends to the greatest one.

Also here: the residual check for the clearing equation, the parametric
family of all clearing vectors, and the minimal-injection bailout plan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    NoConvergenceError,
    OutOfRangeError,
    SingularSystemError,
    VerificationFailedError,
)
from .flow import ClearingResult, run_flow
from .markov import (
    SwampDecomposition,
    active_set,
    decompose_nonactive,
    fundamental_solve,
    invariant_distribution,
    restrict,
    swamp_solution,
)
from .network import FinancialNetwork, Partition, build_network, classify_status
from .scalars import RATIONAL, Scalar, to_scalar

#: default stopping tolerance for fixed-point iteration
PICARD_TOL = Fraction(1, 10**12)
PICARD_TOL_FLOAT = 1e-12
#: hard ceiling on iteration counts regardless of instance size
PICARD_MAX_CAP = 2_000_000


@dataclass(frozen=True)
class FDTrace:
    """Audit trail of the fictitious-defaults iteration.

    `iterates[k]` is the payment vector after k applications of the clamped
    map, `default_sets[k]` the defaulting set it induces, and `solves` the
    (set, input, solution) triple of each restricted linear solve.
    """

    iterates: tuple[tuple[Scalar, ...], ...]
    default_sets: tuple[frozenset[int], ...]
    solves: tuple[tuple[tuple[int, ...], tuple[Scalar, ...], tuple[Scalar, ...]], ...]

    @property
    def outer_iterations(self) -> int:
        return len(self.iterates) - 1


@dataclass(frozen=True)
class SwampSolution:
    """One swamp with its invariant weights and maximal internal payments."""

    banks: tuple[int, ...]
    weights: tuple[Scalar, ...]
    scale: Scalar
    payments: tuple[Scalar, ...]


@dataclass(frozen=True)
class SolutionFamily:
    """All clearing vectors: basic + componentwise combinations of swamp payments."""

    basic: tuple[Scalar, ...]
    swamps: tuple[SwampSolution, ...]
    greatest: tuple[Scalar, ...]
    decomposition: SwampDecomposition

    @property
    def unique(self) -> bool:
        return not self.swamps

    def member(self, coefficients: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """basic + sum_k s_k * swamp_k for coefficients s_k in [0, 1]."""
        if len(coefficients) != len(self.swamps):
            raise OutOfRangeError(
                f"{len(coefficients)} coefficients for {len(self.swamps)} swamps"
            )
        vector = list(self.basic)
        for s, swamp in zip(coefficients, self.swamps):
            if not 0 <= s <= 1:
                raise OutOfRangeError(f"family coefficient {s} outside [0, 1]")
            for bank, pay in zip(swamp.banks, swamp.payments):
                vector[bank] += s * pay
        return tuple(vector)


@dataclass(frozen=True)
class BailoutPlan:
    """Cash injections that make every bank pay in full.

    Replaying the flow with the injections added pays all debts; every
    defaulter that received a positive injection finishes with zero cash
    (one that needed nothing may end with a surplus fed by the others).
    """

    unpaid: tuple[Scalar, ...]
    injections: tuple[Scalar, ...]
    verified: bool


def _inflow(net: FinancialNetwork, p: Sequence[Scalar]) -> list[Scalar]:
    q = net.relative
    result = []
    for i in range(net.n):
        acc = net.cash[i] * 0
        for j in range(net.n):
            if p[j] != 0 and q[j][i] != 0:
                acc += p[j] * q[j][i]
        result.append(acc)
    return result


def phi(net: FinancialNetwork, p: Sequence[Scalar]) -> list[Scalar]:
    """One application of the clamped payment map min(cash + received, debt)."""
    if len(p) != net.n:
        raise OutOfRangeError(f"payment vector has length {len(p)}, expected {net.n}")
    tol = net.zero_tol
    for i, x in enumerate(p):
        if x < -tol or x > net.total_debt[i] + tol:
            raise OutOfRangeError(
                f"payment {x} for bank {i} outside [0, {net.total_debt[i]}]"
            )
    received = _inflow(net, p)
    return [min(net.cash[i] + received[i], net.total_debt[i]) for i in range(net.n)]


def verify_clearing(net: FinancialNetwork, p: Sequence[Scalar]) -> Scalar:
    """Largest componentwise residual of the clearing equation; zero iff p clears."""
    image = phi(net, p)
    residual = net.cash[0] * 0 if net.n else 0
    for i in range(net.n):
        residual = max(residual, abs(p[i] - image[i]))
    return residual


def _partition_for_payments(net: FinancialNetwork, p: Sequence[Scalar]) -> Partition:
    tol = net.zero_tol
    received = _inflow(net, p)
    statuses = []
    for i in range(net.n):
        debt_left = net.total_debt[i] - p[i]
        cash_left = net.cash[i] + received[i] - p[i]
        statuses.append(classify_status(debt_left, cash_left, tol))
    return Partition(tuple(statuses))


def result_from_payments(
    net: FinancialNetwork, p: Sequence[Scalar], algorithm: str
) -> ClearingResult:
    """Wrap a known clearing vector in a result, deriving the final partition
    and cash positions it implies."""
    partition = _partition_for_payments(net, p)
    received = _inflow(net, p)
    final_cash = tuple(net.cash[i] + received[i] - p[i] for i in range(net.n))
    return ClearingResult(
        payments=tuple(p),
        final_partition=partition,
        defaults=frozenset(partition.zero),
        total_time=None,
        final_cash=final_cash,
        trajectory=(),
        algorithm=algorithm,
    )


def fictitious_defaults(net: FinancialNetwork) -> tuple[ClearingResult, FDTrace]:
    """Iterate: clamp, collect the defaulting set, solve payments on it exactly.

    Starts from full payment of every debt. Each round solves the balance
    system restricted to the current defaulting set (treating everyone else
    as paying in full), re-clamps, and stops once the defaulting set stops
    growing; that takes at most n rounds. Nonactive banks never pay and are
    excluded from the solves, which keeps the restrictions transient on
    networks with swamps.
    """
    act = active_set(net)
    tol = net.zero_tol
    b = net.total_debt
    p0 = tuple(b[i] if i in act else b[i] * 0 for i in range(net.n))
    iterates = [p0]
    default_sets: list[frozenset[int]] = []
    solves = []

    p = phi(net, p0)
    for i in range(net.n):
        if i not in act:
            p[i] = p[i] * 0
    d_current = frozenset(i for i in act if p[i] < b[i] - tol)
    iterates.append(tuple(p))
    default_sets.append(d_current)

    while d_current:
        solve_set = sorted(d_current)
        sub = restrict(net.relative, solve_set)
        e = []
        for i in solve_set:
            acc = net.cash[i]
            # non-defaulting active banks are treated as paying in full;
            # nonactive banks pay nothing (and owe nothing to active ones)
            for j in act:
                if j not in d_current and net.relative[j][i] != 0:
                    acc += net.relative[j][i] * b[j]
            e.append(acc)
        try:
            r = fundamental_solve(sub, e)
        except SingularSystemError as exc:
            raise SingularSystemError(
                f"defaulting set {solve_set} is not transient: {exc}"
            ) from exc
        solves.append((tuple(solve_set), tuple(e), tuple(r)))

        s = list(p0)
        for k, i in enumerate(solve_set):
            s[i] = r[k]
        p = phi(net, s)
        for i in range(net.n):
            if i not in act:
                p[i] = p[i] * 0
        d_next = frozenset(i for i in act if p[i] < b[i] - tol)
        iterates.append(tuple(p))
        default_sets.append(d_next)
        if d_next == d_current:
            break
        if not d_current <= d_next or len(default_sets) > net.n + 1:
            raise NoConvergenceError("defaulting sets did not grow monotonically")
        d_current = d_next

    trace = FDTrace(
        iterates=tuple(iterates),
        default_sets=tuple(default_sets),
        solves=tuple(solves),
    )
    return result_from_payments(net, iterates[-1], "fd"), trace


def _default_cap(net: FinancialNetwork) -> int:
    positives = [x for row in net.liabilities for x in row if x > 0]
    positives += [c for c in net.cash if c > 0]
    if not positives:
        return 10 * max(net.n, 1)
    ratio = float(sum(net.total_debt) / min(positives))
    return min(PICARD_MAX_CAP, max(1000, int(10 * net.n * (1 + ratio))))


def picard_iterate(
    net: FinancialNetwork,
    max_iter: int | None = None,
    tol: Scalar | None = None,
) -> list[Scalar]:
    """Iterate the clamped payment map from the full-debt vector.

    Converges downward to the greatest clearing vector (the unique one when
    there are no swamps). In rational mode an exact fixed point is detected
    when reached; otherwise iteration stops once the sup-norm step falls
    below the tolerance. Exists as an independent check on the other two
    algorithms, not as the fast path.
    """
    if net.n == 0:
        return []
    if max_iter is None:
        max_iter = _default_cap(net)
    rational = net.mode == RATIONAL
    if tol is None:
        tol = PICARD_TOL if rational else PICARD_TOL_FLOAT
    elif rational and not isinstance(tol, (Fraction, int)):
        tol = to_scalar(tol, RATIONAL)

    p = list(net.total_debt)
    for _ in range(max_iter):
        received = _inflow(net, p)
        nxt = [min(net.cash[i] + received[i], net.total_debt[i]) for i in range(net.n)]
        change = max(abs(nxt[i] - p[i]) for i in range(net.n))
        if rational:
            if nxt == p:
                return nxt
            if change <= tol:
                return nxt
        else:
            if change <= tol:
                # settle the last few bits so reruns are reproducible
                for _ in range(200):
                    received = _inflow(net, nxt)
                    settled = [
                        min(net.cash[i] + received[i], net.total_debt[i])
                        for i in range(net.n)
                    ]
                    if settled == nxt:
                        break
                    nxt = settled
                return nxt
        p = nxt
    raise NoConvergenceError(f"no fixed point within {max_iter} iterations")


def solution_family(net: FinancialNetwork) -> SolutionFamily:
    """Basic vector from the flow, one generator per swamp, and their sum.

    Every clearing vector is the basic one plus an independent [0, 1]-scaled
    contribution from each swamp; the family is a point exactly when no
    swamps exist.
    """
    basic = run_flow(net, record_trajectory=False).payments
    decomposition = decompose_nonactive(net, active_set(net))
    swamps = []
    for banks in decomposition.swamps:
        dist = invariant_distribution(restrict(net.relative, banks))
        payments = swamp_solution(dist, net.total_debt)
        scale = sum(payments, payments[0] * 0)  # weights sum to one
        swamps.append(
            SwampSolution(
                banks=banks,
                weights=dist.weights,
                scale=scale,
                payments=tuple(payments),
            )
        )
    greatest = list(basic)
    for swamp in swamps:
        for bank, pay in zip(swamp.banks, swamp.payments):
            greatest[bank] += pay
    return SolutionFamily(
        basic=tuple(basic),
        swamps=tuple(swamps),
        greatest=tuple(greatest),
        decomposition=decomposition,
    )


def bailout_vector(net: FinancialNetwork) -> BailoutPlan:
    """Minimal injections in three passes: measure shortfalls, replay with
    shortfalls covered to see what circulates back, then verify.

    Pass 1 runs the flow and records each defaulter's unpaid debt. Pass 2
    reruns with exactly that much extra cash; every debt then clears, and
    whatever a former defaulter holds at the end was overshoot, so its
    injection shrinks by that amount (floored at zero: a defaulter whose
    creditors overfeed it once they are bailed out needs nothing at all).
    Pass 3 reruns with the reduced injections and demands that every debt
    clears and every positively injected bank finishes empty; failure is
    reported, never patched over.
    """
    base = run_flow(net, record_trajectory=False)
    zero = net.cash[0] * 0 if net.n else 0
    defaults = sorted(base.defaults)
    unpaid = [zero] * net.n
    for i in defaults:
        unpaid[i] = net.total_debt[i] - base.payments[i]
    if not defaults:
        return BailoutPlan(
            unpaid=tuple(unpaid), injections=tuple(unpaid), verified=True
        )

    boosted = list(net.cash)
    for i in defaults:
        boosted[i] = boosted[i] + unpaid[i]
    second = run_flow(
        build_network(net.liabilities, boosted, mode=net.mode, ids=net.ids),
        record_trajectory=False,
    )
    tol = net.zero_tol
    injections = [zero] * net.n
    for i in defaults:
        injections[i] = max(unpaid[i] - second.final_cash[i], zero)

    final_cash = list(net.cash)
    for i in defaults:
        final_cash[i] = final_cash[i] + injections[i]
    third = run_flow(
        build_network(net.liabilities, final_cash, mode=net.mode, ids=net.ids),
        record_trajectory=False,
    )
    all_paid = all(
        net.total_debt[i] - third.payments[i] <= tol for i in range(net.n)
    )
    injected_empty = all(
        third.final_cash[i] <= tol for i in defaults if injections[i] > tol
    )
    if not (all_paid and injected_empty):
        raise VerificationFailedError(
            "verification replay failed: "
            + ("unpaid debts remain; " if not all_paid else "")
            + ("" if injected_empty else "an injected bank kept cash")
        )
    return BailoutPlan(
        unpaid=tuple(unpaid), injections=tuple(injections), verified=True
    )
