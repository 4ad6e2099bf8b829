"""Schedule-driven simulator for commit protocols under fork suspension.

The model is asynchronous message passing with crash failures: an explicit
schedule decides which node starts, which in-flight message is delivered,
who crashes, and whose branch is suspended by a fork.  A suspension flips
the node's local value to the suspended marker without any notification, so
a protocol that already announced a local commit keeps acting on stale
state.  Runs are fully deterministic given the schedule, and a trace checker
flags outcomes that the task's carrier rules forbid.
"""
from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import BadResilience, InvalidSchedule, ResourceBound
from .simplicial import BlockRef, Value

__all__ = [
    "NodeState",
    "Message",
    "SimEvent",
    "ScheduleAction",
    "ExecutionTrace",
    "Violation",
    "ViolationReport",
    "CommitProtocol",
    "TwoPhaseCommit",
    "PROTOCOLS",
    "get_protocol",
    "Simulation",
    "run",
    "check_trace",
    "find_violation",
    "ExhaustiveMode",
    "RandomMode",
    "DEFAULT_STATE_BUDGET",
]

DEFAULT_STATE_BUDGET = 1_000_000


@dataclass
class NodeState:
    """Mutable per-node record owned by the simulator.

    ``local_value`` is the node's view of its own leg and is rewritten to
    the suspended marker by a Suspend event; protocols must treat it as
    read-only.  ``memory`` holds protocol-private state and may contain only
    scalars and flat dicts so that states stay comparable.
    """

    chain: BlockRef
    local_value: Value
    phase: str = "init"
    decided: Optional[Value] = None
    crashed: bool = False
    suspended: bool = False
    memory: Dict[str, Any] = field(default_factory=dict)

    @property
    def index(self) -> int:
        return self.chain.chain

    def decide(self, value: Value) -> None:
        if self.decided is not None and self.decided is not value:
            raise AssertionError(f"node {self.index} attempted to change its decision")
        self.decided = value

    def clone(self) -> "NodeState":
        memory = {
            key: dict(value) if isinstance(value, dict) else value
            for key, value in self.memory.items()
        }
        return NodeState(
            chain=self.chain,
            local_value=self.local_value,
            phase=self.phase,
            decided=self.decided,
            crashed=self.crashed,
            suspended=self.suspended,
            memory=memory,
        )

    def fingerprint(self) -> tuple:
        return (
            self.phase,
            self.local_value,
            self.decided,
            self.crashed,
            self.suspended,
            _freeze(self.memory),
        )


def _freeze(value: Any) -> Any:
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


@dataclass(frozen=True)
class Message:
    """One in-flight message; payload entries are sorted key/value pairs."""

    sender: int
    receiver: int
    sequence: int
    payload: Tuple[Tuple[str, Any], ...]

    def payload_dict(self) -> Dict[str, Any]:
        return dict(self.payload)


@dataclass(frozen=True)
class SimEvent:
    """An applied event as it appears in a trace."""

    kind: str
    chain: Optional[int] = None
    message: Optional[Message] = None


@dataclass(frozen=True)
class ScheduleAction:
    """One schedule entry: step/crash/suspend name a chain, deliver a sequence."""

    kind: str
    chain: Optional[int] = None
    sequence: Optional[int] = None


@dataclass(frozen=True)
class ExecutionTrace:
    """Complete record of one run, sufficient to re-check it in isolation."""

    n: int
    t: int
    protocol: str
    inputs: Tuple[Value, ...]
    events: Tuple[SimEvent, ...]
    outcome: Tuple[Optional[Value], ...]
    realized: Tuple[Value, ...]
    crashed: frozenset
    suspended: frozenset
    quiescent: bool

    def schedule(self) -> Tuple[ScheduleAction, ...]:
        """The schedule that replays this trace through ``run``."""
        actions = []
        for event in self.events:
            if event.kind == "deliver":
                actions.append(
                    ScheduleAction(kind="deliver", sequence=event.message.sequence)
                )
            else:
                actions.append(ScheduleAction(kind=event.kind, chain=event.chain))
        return tuple(actions)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    chains: Tuple[int, ...] = ()


@dataclass(frozen=True)
class ViolationReport:
    violations: Tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


class CommitProtocol(ABC):
    """Per-node state machine driven by the simulator."""

    name: str = "abstract"

    @abstractmethod
    def on_start(self, node: NodeState, n: int) -> List[Tuple[int, Dict[str, Any]]]:
        """First action of a node; returns (receiver, payload) messages."""

    @abstractmethod
    def on_message(
        self, node: NodeState, sender: int, payload: Dict[str, Any], n: int
    ) -> List[Tuple[int, Dict[str, Any]]]:
        """Reaction to one delivered message; returns messages to send."""


class TwoPhaseCommit(CommitProtocol):
    """Textbook two-phase commit with chain 0 as coordinator.

    Every node votes its current local value once at start-up.  The
    coordinator broadcasts commit exactly when all n+1 votes say the leg was
    locally committed, and abort otherwise.  There are no timeouts, so a
    crashed coordinator blocks the participants, and there is no second look
    at the local value, so a fork suspension that lands after the vote goes
    unnoticed.
    """

    name = "2pc"
    COORDINATOR = 0

    def _vote(self, node: NodeState) -> Value:
        return Value.ONE if node.local_value is Value.ONE else Value.ZERO

    def on_start(self, node: NodeState, n: int) -> List[Tuple[int, Dict[str, Any]]]:
        vote = self._vote(node)
        if node.index == self.COORDINATOR:
            node.phase = "collecting"
            votes = node.memory.setdefault("votes", {})
            votes[node.index] = vote.value
            return self._maybe_decide(node, n)
        node.phase = "voted"
        return [(self.COORDINATOR, {"kind": "vote", "value": vote.value})]

    def on_message(
        self, node: NodeState, sender: int, payload: Dict[str, Any], n: int
    ) -> List[Tuple[int, Dict[str, Any]]]:
        kind = payload.get("kind")
        if kind == "vote" and node.index == self.COORDINATOR:
            # Votes may arrive before the coordinator's own start step;
            # buffer them so asynchrony alone can never lose one.
            votes = node.memory.setdefault("votes", {})
            votes[sender] = payload["value"]
            if node.phase == "collecting":
                return self._maybe_decide(node, n)
            return []
        if kind == "decision" and node.decided is None:
            node.decide(Value.from_code(payload["value"]))
            node.phase = "done"
        return []

    def _maybe_decide(self, node: NodeState, n: int) -> List[Tuple[int, Dict[str, Any]]]:
        votes = node.memory["votes"]
        if len(votes) < n + 1:
            return []
        decision = (
            Value.ONE
            if all(v == Value.ONE.value for v in votes.values())
            else Value.ZERO
        )
        node.decide(decision)
        node.phase = "done"
        return [
            (peer, {"kind": "decision", "value": decision.value})
            for peer in range(1, n + 1)
        ]


PROTOCOLS: Dict[str, type[CommitProtocol]] = {TwoPhaseCommit.name: TwoPhaseCommit}


def get_protocol(name: str) -> CommitProtocol:
    try:
        return PROTOCOLS[name]()
    except KeyError:
        raise ValueError(f"unknown protocol {name!r}") from None


class Simulation:
    """Explicit simulator state; every mutation happens through ``apply``."""

    def __init__(
        self,
        n: int,
        t: int,
        protocol: CommitProtocol,
        inputs: Sequence[Value],
        block_index: int = 0,
    ) -> None:
        if len(inputs) != n + 1:
            raise ValueError(f"need {n + 1} input values, got {len(inputs)}")
        self.n = n
        self.t = t
        self.protocol = protocol
        self.inputs = tuple(inputs)
        self.nodes = [
            NodeState(chain=BlockRef(i, block_index), local_value=value)
            for i, value in enumerate(inputs)
        ]
        self.in_flight: Dict[int, Message] = {}
        self.next_sequence = 0
        self.started: set[int] = set()
        self.crash_count = 0
        self.suspend_count = 0
        self.events: List[SimEvent] = []

    def clone(self) -> "Simulation":
        twin = Simulation.__new__(Simulation)
        twin.n = self.n
        twin.t = self.t
        twin.protocol = self.protocol
        twin.inputs = self.inputs
        twin.nodes = [node.clone() for node in self.nodes]
        twin.in_flight = dict(self.in_flight)
        twin.next_sequence = self.next_sequence
        twin.started = set(self.started)
        twin.crash_count = self.crash_count
        twin.suspend_count = self.suspend_count
        twin.events = list(self.events)
        return twin

    def fingerprint(self) -> tuple:
        flight = tuple(
            sorted(
                (m.sender, m.receiver, m.payload) for m in self.in_flight.values()
            )
        )
        return (
            tuple(node.fingerprint() for node in self.nodes),
            flight,
            tuple(sorted(self.started)),
        )

    def _check_chain(self, chain: Optional[int]) -> int:
        if chain is None or not (0 <= chain <= self.n):
            raise InvalidSchedule(f"chain index {chain} outside 0..{self.n}")
        return chain

    def _send_all(self, sender: int, outgoing: Iterable[Tuple[int, Dict[str, Any]]]) -> None:
        for receiver, payload in outgoing:
            receiver = self._check_chain(receiver)
            message = Message(
                sender=sender,
                receiver=receiver,
                sequence=self.next_sequence,
                payload=tuple(sorted(payload.items())),
            )
            self.in_flight[message.sequence] = message
            self.next_sequence += 1

    def apply(self, action: ScheduleAction) -> None:
        if action.kind == "step":
            chain = self._check_chain(action.chain)
            node = self.nodes[chain]
            if node.crashed:
                raise InvalidSchedule(f"chain {chain} cannot step after crashing")
            if chain in self.started:
                raise InvalidSchedule(f"chain {chain} already took its start step")
            self.started.add(chain)
            self._send_all(chain, self.protocol.on_start(node, self.n))
            self.events.append(SimEvent(kind="step", chain=chain))
        elif action.kind == "deliver":
            seq = action.sequence
            if seq is None or seq not in self.in_flight:
                raise InvalidSchedule(f"no in-flight message with sequence {seq}")
            message = self.in_flight.pop(seq)
            node = self.nodes[message.receiver]
            if not node.crashed:
                self._send_all(
                    message.receiver,
                    self.protocol.on_message(
                        node, message.sender, message.payload_dict(), self.n
                    ),
                )
            self.events.append(SimEvent(kind="deliver", chain=message.receiver, message=message))
        elif action.kind == "crash":
            chain = self._check_chain(action.chain)
            node = self.nodes[chain]
            if node.crashed:
                raise InvalidSchedule(f"chain {chain} already crashed")
            if self.crash_count >= self.t:
                raise InvalidSchedule(f"crash budget t={self.t} exhausted")
            node.crashed = True
            self.crash_count += 1
            self.events.append(SimEvent(kind="crash", chain=chain))
        elif action.kind == "suspend":
            chain = self._check_chain(action.chain)
            node = self.nodes[chain]
            if node.suspended:
                raise InvalidSchedule(f"chain {chain} is already suspended")
            node.suspended = True
            node.local_value = Value.BOTTOM
            self.suspend_count += 1
            self.events.append(SimEvent(kind="suspend", chain=chain))
        else:
            raise InvalidSchedule(f"unknown action kind {action.kind!r}")

    def quiescent(self) -> bool:
        """No runnable start step and no message deliverable to a live node."""
        for node in self.nodes:
            if not node.crashed and node.index not in self.started:
                return False
        for message in self.in_flight.values():
            if not self.nodes[message.receiver].crashed:
                return False
        return True

    def enabled(self, max_suspensions: int) -> List[ScheduleAction]:
        """Applicable actions in canonical order: steps, delivers, suspends, crashes."""
        actions: List[ScheduleAction] = []
        for node in self.nodes:
            if not node.crashed and node.index not in self.started:
                actions.append(ScheduleAction(kind="step", chain=node.index))
        for seq in sorted(self.in_flight):
            if not self.nodes[self.in_flight[seq].receiver].crashed:
                actions.append(ScheduleAction(kind="deliver", sequence=seq))
        if self.suspend_count < max_suspensions:
            for node in self.nodes:
                if not node.suspended:
                    actions.append(ScheduleAction(kind="suspend", chain=node.index))
        if self.crash_count < self.t:
            for node in self.nodes:
                if not node.crashed:
                    actions.append(ScheduleAction(kind="crash", chain=node.index))
        return actions

    def trace(self) -> ExecutionTrace:
        return ExecutionTrace(
            n=self.n,
            t=self.t,
            protocol=self.protocol.name,
            inputs=self.inputs,
            events=tuple(self.events),
            outcome=tuple(node.decided for node in self.nodes),
            realized=tuple(node.local_value for node in self.nodes),
            crashed=frozenset(node.index for node in self.nodes if node.crashed),
            suspended=frozenset(node.index for node in self.nodes if node.suspended),
            quiescent=self.quiescent(),
        )


def _check_sim_bounds(n: int, t: int) -> None:
    if n < 1:
        raise BadResilience(f"need at least two chains, got n={n}")
    if t < 0 or 2 * t >= n + 1:
        raise BadResilience(f"resilience must satisfy 0 <= t < (n+1)/2 with n={n}, got t={t}")


def run(
    n: int,
    t: int,
    protocol: CommitProtocol,
    schedule: Sequence[ScheduleAction],
    *,
    inputs: Sequence[Value] | None = None,
    block_index: int = 0,
) -> ExecutionTrace:
    """Execute one explicit schedule and return its trace.

    Inputs default to every leg locally committed, the configuration in
    which fork suspension is the only source of trouble.
    """
    _check_sim_bounds(n, t)
    if inputs is None:
        inputs = [Value.ONE] * (n + 1)
    sim = Simulation(n, t, protocol, inputs, block_index)
    for action in schedule:
        sim.apply(action)
    return sim.trace()


def check_trace(trace: ExecutionTrace) -> ViolationReport:
    """Evaluate a trace against the task's carrier rules.

    Flags disagreement among live decisions, any commit decision while some
    leg's realized value is suspended, any abort decision while every leg
    stayed locally committed, and live undecided nodes once the run is
    quiescent.
    """
    violations: list[Violation] = []
    live = [i for i in range(trace.n + 1) if i not in trace.crashed]
    live_decisions = {i: trace.outcome[i] for i in live if trace.outcome[i] is not None}
    distinct = sorted({v.value for v in live_decisions.values()})
    if len(distinct) > 1:
        violations.append(
            Violation(
                kind="atomicity",
                detail=f"live nodes decided differently: {distinct}",
                chains=tuple(sorted(live_decisions)),
            )
        )
    committed = tuple(
        i for i in range(trace.n + 1) if trace.outcome[i] is Value.ONE
    )
    suspended_legs = tuple(
        i for i in range(trace.n + 1) if trace.realized[i] is Value.BOTTOM
    )
    if suspended_legs and committed:
        violations.append(
            Violation(
                kind="atomicity",
                detail=(
                    f"chains {list(committed)} decided commit although the suspended "
                    f"legs {list(suspended_legs)} mandate abort"
                ),
                chains=committed + suspended_legs,
            )
        )
    aborted = tuple(i for i in range(trace.n + 1) if trace.outcome[i] is Value.ZERO)
    if all(v is Value.ONE for v in trace.realized) and aborted:
        violations.append(
            Violation(
                kind="validity",
                detail=(
                    f"chains {list(aborted)} decided abort although every leg "
                    "stayed locally committed"
                ),
                chains=aborted,
            )
        )
    if trace.quiescent:
        undecided = tuple(i for i in live if trace.outcome[i] is None)
        if undecided:
            violations.append(
                Violation(
                    kind="termination",
                    detail=f"live nodes {list(undecided)} are blocked without a decision",
                    chains=undecided,
                )
            )
    return ViolationReport(tuple(violations))


@dataclass(frozen=True)
class ExhaustiveMode:
    """Depth-first enumeration of all schedules up to ``depth`` events."""

    depth: int


@dataclass(frozen=True)
class RandomMode:
    """Seeded uniform random schedules, ``trials`` runs to quiescence."""

    seed: int
    trials: int
    max_events: int = 10_000


def find_violation(
    n: int,
    t: int,
    protocol: CommitProtocol,
    mode: ExhaustiveMode | RandomMode,
    *,
    suspensions: int = 1,
    inputs: Sequence[Value] | None = None,
    state_budget: int | None = None,
) -> Optional[ExecutionTrace]:
    """Search schedules for a trace that the checker rejects.

    Exhaustive mode walks the schedule tree depth first in canonical action
    order, pruning states already seen (two deliveries to unrelated nodes
    commute, so their two orders collapse onto one state).  Random mode
    samples uniformly among enabled actions with a fixed seed.  Returns the
    first violating trace, or None when the bound is reached without one.
    """
    _check_sim_bounds(n, t)
    if inputs is None:
        inputs = [Value.ONE] * (n + 1)
    budget = state_budget if state_budget is not None else DEFAULT_STATE_BUDGET
    if budget < 1:
        raise ValueError("state budget must be positive")
    if isinstance(mode, ExhaustiveMode):
        if mode.depth < 1:
            raise ValueError("exploration depth must be positive")
        root = Simulation(n, t, protocol, inputs)
        seen = {root.fingerprint()}
        stack = [root]
        explored = 0
        while stack:
            sim = stack.pop()
            explored += 1
            if explored > budget:
                raise ResourceBound(
                    f"schedule exploration exceeded the state budget of {budget}",
                    explored=explored,
                )
            trace = sim.trace()
            if check_trace(trace).violations:
                return trace
            if len(sim.events) >= mode.depth:
                continue
            children = sim.enabled(suspensions)
            for action in reversed(children):
                child = sim.clone()
                child.apply(action)
                key = child.fingerprint()
                if key not in seen:
                    seen.add(key)
                    stack.append(child)
        return None
    if isinstance(mode, RandomMode):
        if mode.trials < 1:
            raise ValueError("need at least one trial")
        rng = random.Random(mode.seed)
        for _ in range(mode.trials):
            sim = Simulation(n, t, protocol, inputs)
            while len(sim.events) < mode.max_events:
                actions = sim.enabled(suspensions)
                if not actions:
                    break
                sim.apply(rng.choice(actions))
            trace = sim.trace()
            if check_trace(trace).violations:
                return trace
        return None
    raise TypeError(f"unsupported mode {mode!r}")
