"""Event-driven continuous-time clearing dynamics.

Money flows through the network in intervals of constant rates: indebted
banks with cash pay at unit rate, debt-free banks pay nothing, and cashless
indebted banks pay exactly what flows in (their rates solve a small linear
system over the zero group). An event happens whenever a bank's debt or cash
hits zero; statuses only ever move from positive to zero or absorbing, and
from zero to absorbing, so a run takes at most 2n events.

The initial instant needs special care when some banks start indebted with
no cash: whether such a bank behaves as "positive" depends on rates that in
turn depend on that classification. `big_bang_partition` resolves this with
an exact combinatorial iteration instead of numeric probing.

Nonactive banks (no cash and unreachable from any cash along debt edges)
never move money; they are pinned to zero rates for the whole run and stay
out of every linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    InvariantViolationError,
    NonTransientZeroGroupError,
    SingularSystemError,
    StalledError,
)
from .markov import active_set, closed_classes, fundamental_solve, is_transient, restrict
from .network import FinancialNetwork, Partition, Status, initial_partition
from .scalars import RATIONAL, Scalar, scalar_to_json

#: rates live in [0, 1]; float-mode balances within this band count as zero
RATE_EPS = 1e-12


@dataclass(frozen=True)
class IntervalRates:
    """Out-rates, in-rates and their difference, constant on one interval."""

    out: tuple[Scalar, ...]
    inflow: tuple[Scalar, ...]
    balance: tuple[Scalar, ...]


@dataclass(frozen=True)
class SystemState:
    """Snapshot between events: elapsed time, statuses, debts, cash, payments."""

    time: Scalar
    partition: Partition
    remaining_debt: tuple[Scalar, ...]
    cash: tuple[Scalar, ...]
    paid: tuple[Scalar, ...]

    @property
    def statuses(self) -> tuple[Status, ...]:
        return self.partition.statuses


@dataclass(frozen=True)
class Transition:
    bank: int
    before: Status
    after: Status


@dataclass(frozen=True)
class FlowEvent:
    """One status change: when, who, and the state right after."""

    index: int
    time: Scalar
    movers: tuple[int, ...]
    transitions: tuple[Transition, ...]
    rates: IntervalRates
    state_after: SystemState


@dataclass(frozen=True)
class ClearingResult:
    """Outcome of a clearing computation by any of the algorithms."""

    payments: tuple[Scalar, ...]
    final_partition: Partition
    defaults: frozenset[int]
    total_time: Scalar | None
    final_cash: tuple[Scalar, ...]
    trajectory: tuple[FlowEvent, ...]
    algorithm: str


def _zero_one(net: FinancialNetwork) -> tuple[Scalar, Scalar]:
    if net.mode == RATIONAL:
        return Fraction(0), Fraction(1)
    return 0.0, 1.0


def pinned_banks(net: FinancialNetwork) -> frozenset[int]:
    """Nonactive indebted banks: they hold zero status with zero rates forever."""
    act = active_set(net)
    tol = net.zero_tol
    return frozenset(
        i for i in range(net.n) if i not in act and net.total_debt[i] > tol
    )


def balance_rates(
    net: FinancialNetwork, out: Sequence[Scalar]
) -> tuple[tuple[Scalar, ...], tuple[Scalar, ...]]:
    """In-rates (columns of the proportion matrix applied to out-rates) and
    the per-bank balance inflow - outflow; balances sum to zero."""
    zero, _ = _zero_one(net)
    q = net.relative
    inflow = []
    for i in range(net.n):
        acc = zero
        for j in range(net.n):
            if out[j] != 0 and q[j][i] != 0:
                acc += out[j] * q[j][i]
        inflow.append(acc)
    balance = tuple(inflow[i] - out[i] for i in range(net.n))
    return tuple(inflow), balance


def equilibrium_rates(
    net: FinancialNetwork,
    partition: Partition,
    pinned: frozenset[int] = frozenset(),
) -> IntervalRates:
    """Rates for one interval: 1 on positives, 0 on absorbing and pinned banks,
    and the unique balanced solution on the remaining zero group.

    The zero-group system is solvable exactly when the group (minus pinned
    banks) is transient; during a well-formed run that is guaranteed.
    """
    zero, one = _zero_one(net)
    out: list[Scalar] = [zero] * net.n
    for i in partition.positive:
        out[i] = one
    solve_set = sorted(partition.zero - pinned)
    if solve_set:
        sub = restrict(net.relative, solve_set)
        if not is_transient(sub):
            raise NonTransientZeroGroupError(
                f"zero group {solve_set} contains a closed subnetwork"
            )
        e = []
        for i in solve_set:
            acc = zero
            for j in partition.positive:
                acc += net.relative[j][i]
            e.append(acc)
        try:
            v = fundamental_solve(sub, e)
        except SingularSystemError as exc:
            raise NonTransientZeroGroupError(str(exc)) from exc
        for k, i in enumerate(solve_set):
            out[i] = v[k]
    inflow, balance = balance_rates(net, out)
    return IntervalRates(out=tuple(out), inflow=inflow, balance=balance)


def _event_candidates(
    net: FinancialNetwork, state: SystemState, rates: IntervalRates
) -> list[tuple[Scalar, int, str]]:
    """Potential event times: ("debt", bank) when its debt would run out,
    ("cash", bank) when a positive bank's cash would drain."""
    rate_eps = 0 if net.mode == RATIONAL else RATE_EPS
    candidates: list[tuple[Scalar, int, str]] = []
    for i in range(net.n):
        status = state.statuses[i]
        if status is Status.ABSORBING:
            continue
        if rates.out[i] > rate_eps:
            candidates.append((state.remaining_debt[i] / rates.out[i], i, "debt"))
        if status is Status.POSITIVE and rates.balance[i] < -rate_eps:
            t = -state.cash[i] / rates.balance[i]
            candidates.append((t if t > 0 else t * 0, i, "cash"))
    return candidates


def _tie_window(net: FinancialNetwork, t_prime: Scalar) -> Scalar:
    if net.mode == RATIONAL:
        return t_prime
    return t_prime + RATE_EPS * max(1.0, t_prime)


def next_event(
    net: FinancialNetwork, state: SystemState, rates: IntervalRates
) -> tuple[Scalar, tuple[int, ...]]:
    """Duration until the next status change and every bank moving at it.

    Candidates: debt runs out (any paying bank) or cash runs out (positive
    banks with negative balance). Ties are grouped. A zero duration can only
    arise for a positive bank already sitting at zero cash whose balance has
    turned negative; callers treat that as an instantaneous reclassification.
    """
    candidates = _event_candidates(net, state, rates)
    if not candidates:
        raise StalledError("no finite event candidate; positive group should be nonempty")
    t_prime = min(t for t, _, _ in candidates)
    window = _tie_window(net, t_prime)
    movers = {i for t, i, _ in candidates if t <= window}
    return t_prime, tuple(sorted(movers))


def step(
    net: FinancialNetwork,
    state: SystemState,
    pinned: frozenset[int] | None = None,
    index: int = 0,
) -> FlowEvent:
    """Advance to the next event: compute rates, move time forward linearly,
    and reclassify every mover (debt hitting zero wins over cash hitting zero)."""
    if pinned is None:
        pinned = pinned_banks(net)
    if not state.partition.positive:
        raise StalledError("cannot step: no positive banks remain")
    rates = equilibrium_rates(net, state.partition, pinned)
    candidates = _event_candidates(net, state, rates)
    if not candidates:
        raise StalledError("no finite event candidate; positive group should be nonempty")
    t_prime = min(t for t, _, _ in candidates)
    window = _tie_window(net, t_prime)
    hits: dict[int, set[str]] = {}
    for t, i, kind in candidates:
        if t <= window:
            hits.setdefault(i, set()).add(kind)
    movers = tuple(sorted(hits))
    tol = net.zero_tol

    debt = [state.remaining_debt[i] - rates.out[i] * t_prime for i in range(net.n)]
    cash = [state.cash[i] + rates.balance[i] * t_prime for i in range(net.n)]
    paid = [state.paid[i] + rates.out[i] * t_prime for i in range(net.n)]
    if net.mode != RATIONAL:
        for vec in (debt, cash):
            for i, x in enumerate(vec):
                if x < -tol:
                    raise InvariantViolationError(f"negative quantity {x} at bank {i}")
                if abs(x) <= tol:
                    vec[i] = 0.0

    statuses = list(state.statuses)
    transitions = []
    for i in movers:
        before = statuses[i]
        if "debt" in hits[i]:
            after = Status.ABSORBING
            debt[i] = debt[i] * 0
            paid[i] = net.total_debt[i]
        else:
            after = Status.ZERO
            cash[i] = cash[i] * 0
        if before is Status.ABSORBING or (before is Status.ZERO and after is not Status.ABSORBING):
            raise InvariantViolationError(f"forbidden transition {before} -> {after} for bank {i}")
        statuses[i] = after
        transitions.append(Transition(bank=i, before=before, after=after))

    if t_prime <= 0:
        # only the degenerate instant reclassification is allowed at zero duration
        for tr in transitions:
            if not (tr.before is Status.POSITIVE and tr.after is Status.ZERO
                    and state.cash[tr.bank] <= tol):
                raise InvariantViolationError("zero-duration event outside degenerate case")

    total_before = sum(net.cash)
    total_after = sum(cash)
    if net.mode == RATIONAL:
        if total_after != total_before:
            raise InvariantViolationError("cash conservation violated")
    else:
        scale = max(1.0, float(total_before))
        if abs(total_after - total_before) > 1e-9 * scale:
            raise InvariantViolationError("cash conservation drifted beyond tolerance")

    after_state = SystemState(
        time=state.time + t_prime,
        partition=Partition(tuple(statuses)),
        remaining_debt=tuple(debt),
        cash=tuple(cash),
        paid=tuple(paid),
    )
    return FlowEvent(
        index=index,
        time=after_state.time,
        movers=movers,
        transitions=tuple(transitions),
        rates=rates,
        state_after=after_state,
    )


def big_bang_partition(net: FinancialNetwork) -> tuple[Partition, frozenset[int]]:
    """Resolve the time-zero classification of cashless indebted banks.

    Iterates exact equilibrium solves: members of closed groups inside the
    active zero set are revealed as positive up front (their inflow has
    nowhere to drain, so no balanced rate below capacity exists); then any
    bank whose solved rate reaches capacity is revealed, and revealed banks
    whose in-rate falls below capacity under the refined rates are demoted
    again. The revealed set shrinks monotonically, so this ends in at most
    as many rounds as there are cashless banks.

    Returns the modified partition for the first interval and the revealed
    set. Nonactive banks are never candidates; they stay zero with no flow.
    """
    part = initial_partition(net)
    act = active_set(net)
    zero_active = sorted(part.zero & act)
    if not zero_active:
        return part, frozenset()

    one = Fraction(1) if net.mode == RATIONAL else 1.0
    pinned = pinned_banks(net)

    revealed: set[int] = set()
    for group in closed_classes(net, set(zero_active)):
        revealed.update(group)

    def rates_for(reveal: set[int]) -> IntervalRates:
        statuses = list(part.statuses)
        for i in reveal:
            statuses[i] = Status.POSITIVE
        return equilibrium_rates(net, Partition(tuple(statuses)), pinned)

    # first solve: move every zero bank whose balanced rate reaches capacity
    first = rates_for(revealed)
    for i in zero_active:
        if i not in revealed and first.out[i] >= one:
            revealed.add(i)

    # shrink: a revealed bank stays only while its in-rate holds at capacity
    while revealed:
        rates = rates_for(revealed)
        demoted = {i for i in revealed if rates.inflow[i] < one}
        if not demoted:
            break
        revealed -= demoted

    statuses = list(part.statuses)
    for i in revealed:
        statuses[i] = Status.POSITIVE
    return Partition(tuple(statuses)), frozenset(revealed)


def run_flow(net: FinancialNetwork, record_trajectory: bool = True) -> ClearingResult:
    """Run the dynamics to completion and return the clearing payments.

    Applies the time-zero normalization, then steps until no positive bank
    remains. The resulting payment vector solves the clearing equation; total
    time never exceeds the largest single debt.
    """
    zero, _ = _zero_one(net)
    pinned = pinned_banks(net)
    start_partition, _revealed = big_bang_partition(net)
    state = SystemState(
        time=zero,
        partition=start_partition,
        remaining_debt=net.total_debt,
        cash=net.cash,
        paid=(zero,) * net.n,
    )
    events: list[FlowEvent] = []
    k = 0
    while state.partition.positive:
        event = step(net, state, pinned, k)
        state = event.state_after
        if record_trajectory:
            events.append(event)
        k += 1
        if k > 2 * net.n:
            raise InvariantViolationError("event count exceeded 2n")

    max_debt = max(net.total_debt, default=zero)
    if state.time > max_debt + net.zero_tol:
        raise InvariantViolationError(
            f"total time {state.time} exceeds the largest debt {max_debt}"
        )
    return ClearingResult(
        payments=state.paid,
        final_partition=state.partition,
        defaults=frozenset(state.partition.zero),
        total_time=state.time,
        final_cash=state.cash,
        trajectory=tuple(events),
        algorithm="flow",
    )


def trace_line(net: FinancialNetwork, event: FlowEvent) -> dict:
    """One JSON-ready object per event, for the line-oriented trace output."""
    after = event.state_after
    return {
        "k": event.index,
        "time": scalar_to_json(event.time),
        "movers": [net.ids[i] for i in event.movers],
        "transitions": [
            {"id": net.ids[t.bank], "from": t.before.value, "to": t.after.value}
            for t in event.transitions
        ],
        "debt": [scalar_to_json(x) for x in after.remaining_debt],
        "cash": [scalar_to_json(x) for x in after.cash],
        "out_rates": [scalar_to_json(x) for x in event.rates.out],
    }
