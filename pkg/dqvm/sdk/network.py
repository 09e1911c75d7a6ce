# Copyright 2026 The dqvm authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Agents, networks and the distributed interpreter.

A network is a resource pattern preparing shared entanglement, a list of
agent instances and a configuration pairing resource qubits with agent qubits
and agent channels with each other. Compilation renames everything into one
global namespace; execution interleaves the agents round-robin against one
global quantum and classical state.
"""
from dataclasses import dataclass, field
import itertools
import logging
import typing

import networkx as nx
import numpy as np

from dqvm.sdk import commands as cmds
from dqvm.sdk import composer
from dqvm.sdk import exceptions
from dqvm.sdk import interpreter
from dqvm.sdk import patterns
from dqvm.sdk import state as st
from dqvm.sdk import utils
from dqvm.sdk.sexpr import Atom, ListExpr, build

logger = logging.getLogger(__name__)

BUFFERED = 'buffered'
RENDEZVOUS = 'rendezvous'
CHANNEL_POLICIES = (BUFFERED, RENDEZVOUS)

CLASSICAL = 'classical'
QUANTUM = 'quantum'

_RESOURCE = '%resource'


@dataclass(frozen=True)
class AgentPattern:
    name: str
    qubit_sort: typing.Tuple
    channel_sort: typing.Tuple
    commands: typing.Tuple
    classical_inputs: typing.Tuple = ()

    def __post_init__(self):
        for attr in ('qubit_sort', 'channel_sort', 'commands', 'classical_inputs'):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))

    def received_qubits(self):
        return [c.name for c in self.commands if isinstance(c, cmds.QRecv)]

    def working_qubits(self):
        """Qubits used by the program that are neither in the sort nor received."""
        excluded = set(self.qubit_sort) | set(self.received_qubits())
        return utils.flatten([
            [q for q in c.qubits if q not in excluded] for c in self.commands
        ])

    @property
    def names(self):
        signals = [s.outcome_qubits() for c in self.commands for s in c.signals()]
        return utils.flatten([self.qubit_sort, self.received_qubits()]
                             + [c.qubits for c in self.commands] + signals)

    def channels_used(self):
        return utils.flatten([[c.channel] for c in self.commands if c.distributed])

    def rename(self, qubits=None, channels=None, inputs=None, name=None):
        return AgentPattern(
            name=name or self.name,
            qubit_sort=[cmds._lookup(qubits, q) for q in self.qubit_sort],
            channel_sort=[cmds._lookup(channels, c) for c in self.channel_sort],
            commands=cmds.rename_commands(self.commands, qubits, channels, inputs),
            classical_inputs=[cmds._lookup(inputs, n) for n in self.classical_inputs],
        )

    def to_sexpr(self):
        return ListExpr([Atom('defagent'), Atom(self.name), build(self.qubit_sort),
                         build(self.channel_sort), cmds.commands_to_sexpr(self.commands)])


@dataclass(frozen=True)
class AgentInstance:
    label: str
    pattern: AgentPattern


@dataclass(frozen=True)
class NetworkConfig:
    # (resource name, (agent label, agent qubit name))
    qubit_pairs: typing.Tuple = ()
    # ((agent label, channel), (agent label, channel))
    channel_pairs: typing.Tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'qubit_pairs', tuple(
            (r, tuple(a)) for r, a in self.qubit_pairs))
        object.__setattr__(self, 'channel_pairs', tuple(
            (tuple(a), tuple(b)) for a, b in self.channel_pairs))


@dataclass(frozen=True)
class NetworkDef:
    name: typing.Optional[str]
    resource: patterns.Pattern
    agents: typing.Tuple
    config: NetworkConfig = field(default_factory=NetworkConfig)

    def __post_init__(self):
        object.__setattr__(self, 'agents', tuple(self.agents))

    @property
    def labels(self):
        return [a.label for a in self.agents]

    def agent(self, label):
        for a in self.agents:
            if a.label == label:
                return a
        raise exceptions.PairMismatch(f"Network {self.name} has no agent '{label}'")

    def to_sexpr(self):
        items = [Atom('defnetwork'), Atom(self.name or 'anonymous'),
                 ListExpr([Atom('resource'), self.resource.to_sexpr()])]
        for a in self.agents:
            p = a.pattern
            items.append(ListExpr([Atom('agent'), Atom(a.label), build(p.qubit_sort),
                                   build(p.channel_sort),
                                   cmds.commands_to_sexpr(p.commands)]))
        qubits = [build([f"r.{r}", f"{label}.{q}"]) for r, (label, q) in self.config.qubit_pairs]
        channels = [build([f"{a}.{x}", f"{b}.{y}"])
                    for (a, x), (b, y) in self.config.channel_pairs]
        items.append(ListExpr([
            Atom('config'),
            ListExpr([Atom('qubits')] + qubits),
            ListExpr([Atom('channels')] + channels),
        ]))
        return ListExpr(items)


@dataclass
class CompiledNetwork:
    name: typing.Optional[str]
    resource: patterns.AssembledSequence
    order: typing.List[str]
    programs: typing.Dict[str, typing.Tuple]
    ownership: typing.Dict
    inputs: typing.List
    working: typing.List
    # channel id -> (label, label)
    channels: typing.Dict[str, typing.Tuple]
    refs: typing.Dict[typing.Tuple, int]

    def ref(self, agent, name):
        try:
            return self.refs[(agent, name)]
        except KeyError:
            raise exceptions.UnknownQubit(f"Agent '{agent}' has no qubit {name}")

    def outputs(self):
        """Qubits owned by an agent at the start, minus the ones the programs measure."""
        measured = {c.qubit for p in self.programs.values() for c in p
                    if isinstance(c, cmds.Measure)}
        sent = {c.qubit for p in self.programs.values() for c in p if isinstance(c, cmds.QSend)}
        return [q for q in self.ownership if q not in measured and q not in sent]

    def to_sexpr(self):
        items = [Atom('network'), Atom(self.name or 'anonymous'),
                 ListExpr([Atom('resource'), self.resource.to_sexpr()])]
        for label in self.order:
            items.append(ListExpr([Atom('agent'), Atom(label),
                                   cmds.commands_to_sexpr(self.programs[label])]))
        items.append(ListExpr([Atom('channels')] + [
            build([cid, a, b]) for cid, (a, b) in self.channels.items()
        ]))
        items.append(build(['inputs'] + list(self.inputs)))
        items.append(ListExpr([Atom('ownership')] + [
            build([q, label]) for q, label in sorted(self.ownership.items())
        ]))
        return ListExpr(items)


def _agent_qualify(label, name):
    return name if isinstance(name, int) else composer.qualify(label, name)


def _check_labels(defn):
    if len(set(defn.labels)) != len(defn.labels):
        raise exceptions.NetworkError(f"Network {defn.name} has duplicate agent labels")
    if defn.resource.inputs:
        raise exceptions.NetworkError(f"Resource of network {defn.name} must have no inputs")


def _qubit_bindings(defn, fresh):
    bindings = composer.BindingSet()
    concrete = [q for q in defn.resource.names if isinstance(q, int)]
    for a in defn.agents:
        concrete += [q for q in a.pattern.names if isinstance(q, int)]
    fresh.reserve(concrete)
    for q in concrete:
        bindings.bind(q, q)

    claimed_outputs, claimed_sort = set(), set()
    pairs = []
    for r, (label, q) in defn.config.qubit_pairs:
        agent = defn.agent(label).pattern
        if r not in defn.resource.outputs:
            raise exceptions.PairMismatch(f"{r} is not a resource output")
        if q not in agent.qubit_sort:
            raise exceptions.PairMismatch(f"{label}.{q} is not in the qubit sort of {label}")
        if r in claimed_outputs:
            raise exceptions.PairMismatch(f"Resource qubit {r} is claimed twice")
        if (label, q) in claimed_sort:
            raise exceptions.PairMismatch(f"{label}.{q} receives two resource qubits")
        claimed_outputs.add(r)
        claimed_sort.add((label, q))
        pairs.append((_agent_qualify(_RESOURCE, r), _agent_qualify(label, q)))
    composer.bind_pairs(pairs, bindings, fresh)

    for q in defn.resource.names:
        name = _agent_qualify(_RESOURCE, q)
        if name not in bindings:
            bindings.bind(name, fresh())
    for a in defn.agents:
        for q in a.pattern.names:
            name = _agent_qualify(a.label, q)
            if name not in bindings:
                bindings.bind(name, fresh())
    return bindings


def _channel_ids(defn):
    ids, endpoints = {}, {}
    fresh = utils.FreshNames(prefix='ch')
    labels = set(defn.labels)
    for (a, x), (b, y) in defn.config.channel_pairs:
        if a not in labels or b not in labels:
            raise exceptions.InvalidChannelPair(f"Channel pair ({a}.{x} {b}.{y}) names an "
                                                f"unknown agent")
        if a == b:
            raise exceptions.InvalidChannelPair(f"Channel pair ({a}.{x} {b}.{y}) links agent "
                                                f"{a} with itself")
        for label, channel in ((a, x), (b, y)):
            if channel not in defn.agent(label).pattern.channel_sort:
                raise exceptions.InvalidChannelPair(
                    f"{label}.{channel} is not in the channel sort of {label}")
            if (label, channel) in ids:
                raise exceptions.InvalidChannelPair(f"{label}.{channel} is paired twice")
        cid = fresh()
        ids[(a, x)] = ids[(b, y)] = cid
        endpoints[cid] = (a, b)

    for a in defn.agents:
        p = a.pattern
        for channel in utils.ordered_union(p.channel_sort, p.channels_used()):
            if channel not in p.channel_sort:
                raise exceptions.DanglingChannel(
                    f"Agent {a.label} uses channel {channel} outside its channel sort")
            if (a.label, channel) not in ids:
                raise exceptions.DanglingChannel(f"Channel {a.label}.{channel} is not paired")
    return ids, endpoints


def compile_network(defn, fresh=None):
    """Rename resource and agents into one namespace of concrete references."""
    _check_labels(defn)
    fresh = fresh if fresh is not None else utils.FreshReferences()
    bindings = _qubit_bindings(defn, fresh)
    channel_ids, endpoints = _channel_ids(defn)

    resource = defn.resource.rename(lambda q: bindings[_agent_qualify(_RESOURCE, q)])
    assembled = patterns.AssembledSequence(resource.commands, (), resource.outputs,
                                           resource.space)
    resource_outputs = set(resource.outputs)

    programs, ownership, refs = {}, {}, {}
    inputs, working = [], []
    for a in defn.agents:
        label, p = a.label, a.pattern

        def qubit(q, label=label):
            return bindings[_agent_qualify(label, q)]

        def channel(c, label=label):
            return channel_ids[(label, c)]

        def input_name(n, label=label):
            return f"{label}.{n}"

        for q in p.names:
            refs[(label, q)] = qubit(q)
        owned = [qubit(q) for q in p.qubit_sort] + [qubit(q) for q in p.working_qubits()]
        for ref in owned:
            if ref in ownership and ownership[ref] != label:
                raise exceptions.PairMismatch(
                    f"Qubit {ref} is owned by both {ownership[ref]} and {label}")
            ownership[ref] = label
        inputs += [qubit(q) for q in p.qubit_sort if qubit(q) not in resource_outputs]
        working += [qubit(q) for q in p.working_qubits()]
        programs[label] = tuple(cmds.rename_commands(p.commands, qubit, channel, input_name))

    for ref in resource.outputs:
        if ref not in ownership:
            raise exceptions.UnclaimedResourceQubit(
                f"Resource qubit {ref} is not claimed by any agent")

    compiled = CompiledNetwork(
        name=defn.name,
        resource=assembled,
        order=defn.labels,
        programs=programs,
        ownership=ownership,
        inputs=utils.flatten([inputs]),
        working=utils.flatten([working]),
        channels=endpoints,
        refs=refs,
    )
    logger.debug(f"Compiled network {defn.name}: inputs {compiled.inputs}, "
                 f"channels {compiled.channels}")
    return compiled


class NetworkState:
    """Channel map, remaining programs and the global environment of one run."""

    def __init__(self, compiled, channels, programs, env, ownership, aliases=None, trace=(),
                 probability=1.0):
        self.compiled = compiled
        self.channels = channels
        self.programs = programs
        self.env = env
        self.ownership = ownership
        self.aliases = aliases or {}
        self.trace = tuple(trace)
        self.probability = probability

    def copy(self):
        return NetworkState(self.compiled, dict(self.channels), dict(self.programs), self.env,
                            dict(self.ownership), dict(self.aliases), self.trace,
                            self.probability)

    @property
    def finished(self):
        return not any(self.programs.values())

    def blocked(self):
        return {label: str(p[0].to_sexpr()) for label, p in self.programs.items() if p}


def _resource_state(resource, tol):
    if not resource.commands and not resource.space:
        return st.QuantumState()
    branches = interpreter.run_sequence(resource.commands, space=resource.space, tol=tol)
    first = branches[0].final.quantum
    order = list(first.qubits)
    reference = st.reference_full_state(first, order)
    for branch in branches[1:]:
        other = branch.final.quantum
        if set(other.qubits) != set(order) or not st.state_equal_up_to_phase(
                st.reference_full_state(other, order), reference, tol):
            raise exceptions.NondeterministicResource(
                "Resource pattern branches do not agree up to phase")
    return first


def init_network(compiled, inputs=None, input_bits=None, tol=st.DEFAULT_TOL):
    """Prepare the resource, then the network inputs and the agents' working qubits.

    inputs maps a network input reference, or a tuple of them for a joint
    state, to amplitudes.
    """
    quantum = _resource_state(compiled.resource, tol)
    given = []
    for key, amplitudes in (inputs or {}).items():
        qubits = key if isinstance(key, tuple) else (key, )
        for q in qubits:
            if q not in compiled.inputs:
                raise exceptions.UnknownQubit(f"Qubit {q} is not an input of network "
                                              f"{compiled.name}")
        quantum = st.init_tangle(quantum, qubits, amplitudes, tol=tol)
        given += qubits
    missing = [q for q in compiled.inputs if q not in given]
    if missing:
        raise exceptions.UnknownQubit(f"Network inputs {missing} have no initial state")
    for q in compiled.working:
        quantum = st.init_qubit(quantum, q, st.PLUS, tol=tol)

    env = interpreter.Environment(quantum, st.ClassicalState(inputs=input_bits))
    return NetworkState(
        compiled,
        channels={cid: None for cid in compiled.channels},
        programs={label: tuple(p) for label, p in compiled.programs.items()},
        env=env,
        ownership=dict(compiled.ownership),
    )


@dataclass
class Turn:
    state: NetworkState
    progressed: bool
    status: str

    DONE = 'done'
    BLOCKED = 'blocked'
    FORKED = 'forked'


def _resolve(state, command):
    if not state.aliases:
        return command
    return command.rename(qubits=lambda q: state.aliases.get(q, q))


def _check_ownership(state, label, qubits):
    for q in qubits:
        owner = state.ownership.get(q)
        if owner != label:
            raise exceptions.OwnershipViolation(label, q, owner)


def _partner(state, channel, label):
    a, b = state.compiled.channels[channel]
    return b if label == a else a


def _deliver(state, label, command, value):
    """Complete a receive of value on behalf of label."""
    kind, payload = value
    expected = QUANTUM if isinstance(command, cmds.QRecv) else CLASSICAL
    if kind != expected:
        raise exceptions.ChannelTypeError(
            f"{label} expects a {expected} value on {command.channel}, found {kind}")
    if kind == CLASSICAL:
        state.env = state.env.replace(classical=state.env.classical.with_input(command.name,
                                                                              payload))
    else:
        state.aliases[command.name] = payload
        state.ownership[payload] = label


def _outgoing(state, label, command):
    """Evaluate a send: the value to put on the channel."""
    if isinstance(command, cmds.Send):
        return CLASSICAL, interpreter.eval_signal(state.env.classical, command.signal)
    _check_ownership(state, label, command.qubits)
    if command.qubit in state.env.quantum.measured:
        raise exceptions.AlreadyMeasured(f"Cannot send measured qubit {command.qubit}")
    return QUANTUM, command.qubit


def _record(state, label, command):
    state.programs[label] = state.programs[label][1:]
    state.trace = state.trace + ((label, command), )


def _communicate(state, label, command, policy):
    """Try one communication command; returns False when it blocks."""
    sending = isinstance(command, (cmds.Send, cmds.QSend))
    if policy == BUFFERED:
        slot = state.channels[command.channel]
        if sending:
            if slot is not None:
                return False
            value = _outgoing(state, label, command)
            state.channels[command.channel] = value
            if value[0] == QUANTUM:
                state.ownership[value[1]] = None
        else:
            if slot is None:
                return False
            _deliver(state, label, command, slot)
            state.channels[command.channel] = None
        _record(state, label, command)
        return True

    partner = _partner(state, command.channel, label)
    pending = state.programs[partner]
    if not pending:
        return False
    other = _resolve(state, pending[0])
    matches = (cmds.Recv, cmds.QRecv) if sending else (cmds.Send, cmds.QSend)
    if not isinstance(other, matches) or other.channel != command.channel:
        return False
    sender, receiver = (label, partner) if sending else (partner, label)
    send_cmd, recv_cmd = (command, other) if sending else (other, command)
    value = _outgoing(state, sender, send_cmd)
    if value[0] == QUANTUM:
        state.ownership[value[1]] = None
    _deliver(state, receiver, recv_cmd, value)
    _record(state, sender, send_cmd)
    _record(state, receiver, recv_cmd)
    return True


def step_agent(state, label, mode=interpreter.ENUMERATE, channel_policy=BUFFERED,
               tol=st.PRUNE_TOL):
    """Run one turn of an agent until its program is empty or it blocks.

    In enumerate mode a measurement ends the turn early with one forked state
    per possible outcome; the agent resumes its turn in each of them.
    """
    state = state.copy()
    progressed = False
    while state.programs[label]:
        command = _resolve(state, state.programs[label][0])
        if command.distributed:
            if not _communicate(state, label, command, channel_policy):
                logger.debug(f"Agent {label} blocked at {command.to_sexpr()}")
                return [Turn(state, progressed, Turn.BLOCKED)]
            progressed = True
            continue

        _check_ownership(state, label, command.qubits)
        if mode == interpreter.ENUMERATE and isinstance(command, cmds.Measure):
            turns = []
            for outcome, (env, p) in sorted(
                    interpreter.measurement_forks(state.env, command, tol).items()):
                child = state.copy()
                child.env = env
                child.probability *= p
                _record(child, label, command)
                turns.append(Turn(child, True, Turn.FORKED))
            return turns

        env, p = interpreter.exec_command(state.env, command, tol=tol)
        state.env = env
        state.probability *= p
        _record(state, label, command)
        progressed = True
    return [Turn(state, progressed, Turn.DONE)]


class NetworkBranch(interpreter.Branch):
    def __init__(self, state):
        super().__init__(state.env.classical.outcomes, state.probability, state.env)
        self.ownership = dict(state.ownership)
        self.channels = dict(state.channels)
        self.trace = state.trace
        self.aliases = dict(state.aliases)

    def _items(self):
        owned = [build([q, label]) for q, label in sorted(self.ownership.items())
                 if label is not None and q in self.final.quantum]
        return super()._items() + [ListExpr([Atom('ownership')] + owned)]

    def to_dict(self):
        data = super().to_dict()
        data['ownership'] = {str(q): label for q, label in sorted(self.ownership.items())
                             if label is not None and q in self.final.quantum}
        return data


def run_network(state, mode=interpreter.ENUMERATE, seed=None, order=None,
                channel_policy=BUFFERED, tol=st.PRUNE_TOL):
    """Round-robin execution until every program is empty.

    A full round in which no agent progresses raises DeadlockError.
    """
    if mode not in interpreter.MODES:
        raise ValueError(f"Unknown mode '{mode}'")
    if channel_policy not in CHANNEL_POLICIES:
        raise ValueError(f"Unknown channel policy '{channel_policy}'")
    order = list(order or state.compiled.order)
    if sorted(order) != sorted(state.compiled.order):
        raise ValueError(f"Schedule {order} is not a permutation of the agents")
    if mode == interpreter.SAMPLE:
        state = state.copy()
        state.env = interpreter.Environment(state.env.quantum, state.env.classical,
                                            np.random.default_rng(seed))

    branches = interpreter.BranchList()
    stack = [(state, 0, 0)]
    while stack:
        state, turn, idle = stack.pop()
        while True:
            if state.finished:
                branches.append(NetworkBranch(state))
                break
            if idle >= len(order):
                raise exceptions.DeadlockError(state.blocked())
            label = order[turn % len(order)]
            if not state.programs[label]:
                turn, idle = turn + 1, idle + 1
                continue
            turns = step_agent(state, label, mode, channel_policy, tol)
            if turns[0].status == Turn.FORKED:
                for t in reversed(turns):
                    stack.append((t.state, turn, 0))
                break
            state = turns[0].state
            turn += 1
            idle = 0 if turns[0].progressed else idle + 1
    return branches


def run(network, inputs=None, input_bits=None, mode=interpreter.ENUMERATE, seed=None,
        order=None, channel_policy=BUFFERED, tol=st.DEFAULT_TOL):
    """Compile if needed, initialize and run a network."""
    compiled = network if isinstance(network, CompiledNetwork) else compile_network(network)
    state = init_network(compiled, inputs, input_bits, tol=tol)
    return compiled, run_network(state, mode, seed, order, channel_policy)


# composition

def _side_tags(n1, n2):
    if n1.name and n2.name and n1.name != n2.name:
        return n1.name, n2.name
    return '1', '2'


def _tag_agent(tag, label, pattern):
    """Agent pattern with every variable, channel and input prefixed by tag and label."""
    prefix = f"{tag}.{label}"
    return pattern.rename(
        qubits=lambda q: q if isinstance(q, int) else f"?{prefix}.{q[1:]}",
        channels=lambda c: f"{prefix}.{c}",
        inputs=lambda n: f"{prefix}.{n}",
    )


def _tag_qubit(tag, label, q):
    return q if isinstance(q, int) else f"?{tag}.{label}.{q[1:]}"


def _eliminate_local_channels(commands, local):
    """Replace sends and receives on channels local to one agent by substitution.

    local maps each local channel name to its partner channel name.
    """
    pending, signals, qubits = {}, {}, {}
    result = []
    for command in commands:
        command = command.rename(qubits=lambda q: qubits.get(q, q),
                                 inputs=lambda n: signals.get(n, n))
        if not command.distributed or command.channel not in local:
            result.append(command)
            continue
        if isinstance(command, (cmds.Send, cmds.QSend)):
            pending[local[command.channel]] = command
            continue
        sent = pending.pop(command.channel, None)
        if sent is None:
            raise exceptions.InvalidChannelPair(
                f"Local channel {command.channel} is received from before it is sent on")
        if isinstance(command, cmds.Recv) and isinstance(sent, cmds.Send):
            signals[command.name] = sent.signal
        elif isinstance(command, cmds.QRecv) and isinstance(sent, cmds.QSend):
            qubits[command.name] = sent.qubit
        else:
            raise exceptions.ChannelTypeError(
                f"Local channel {command.channel} mixes classical and quantum values")
    if pending:
        raise exceptions.InvalidChannelPair(f"Values sent on {sorted(pending)} are never "
                                            f"received")
    return result


def compose_networks(n1, n2, agent_pairs=None, qubit_pairs=(), name=None):
    """Sequential composition of networks, merging paired agents.

    agent_pairs maps n1 agent labels to n2 agent labels (several n1 agents may
    map to the same n2 agent); a merged agent runs the n1 programs first, in
    n1 order, then the n2 program. qubit_pairs ``((n1 label, q), (n2 label, q'))``
    identify q' with q inside a merged agent. Resources compose in parallel.
    """
    agent_pairs = dict(agent_pairs or {})
    for a, b in agent_pairs.items():
        n1.agent(a)
        n2.agent(b)
    t1, t2 = _side_tags(n1, n2)

    def merged_label(side, label):
        if side == 1 and label in agent_pairs:
            return agent_pairs[label]
        if side == 1 and label in n2.labels:
            return f"{t1}.{label}"
        return label

    # n2 qubit name -> n1 qubit name, both tagged
    identified = {}
    for (a, q1), (b, q2) in qubit_pairs:
        n1.agent(a)
        n2.agent(b)
        if agent_pairs.get(a) != b:
            raise exceptions.PairMismatch(f"{a} and {b} are not merged into one agent")
        if q1 not in n1.agent(a).pattern.names:
            raise exceptions.PairMismatch(f"{a} has no qubit {q1}")
        if q2 not in n2.agent(b).pattern.qubit_sort:
            raise exceptions.PairMismatch(f"{q2} is not in the qubit sort of {b}")
        source, target = _tag_qubit(t1, a, q1), _tag_qubit(t2, b, q2)
        if target in identified:
            raise exceptions.ConflictingBinding(f"{b}.{q2} is paired twice")
        identified[target] = source
    claimed = {_tag_qubit(t2, label, q) for _, (label, q) in n2.config.qubit_pairs}
    for target in identified:
        if target in claimed:
            raise exceptions.ConflictingBinding(
                f"{target} is both a resource qubit of the second network and paired")

    parts = {}
    for side, tag, net in ((1, t1, n1), (2, t2, n2)):
        for a in net.agents:
            tagged = _tag_agent(tag, a.label, a.pattern)
            if side == 2:
                tagged = tagged.rename(qubits=lambda q: identified.get(q, q))
            parts.setdefault(merged_label(side, a.label), []).append(tagged)

    channel_pairs, local = [], {}
    for side, tag, net in ((1, t1, n1), (2, t2, n2)):
        for (a, x), (b, y) in net.config.channel_pairs:
            la, lb = merged_label(side, a), merged_label(side, b)
            cx, cy = f"{tag}.{a}.{x}", f"{tag}.{b}.{y}"
            if la == lb:
                local[cx], local[cy] = cy, cx
            else:
                channel_pairs.append(((la, cx), (lb, cy)))

    agents = []
    order = [merged_label(1, a.label) for a in n1.agents] + n2.labels
    for label in utils.flatten([order]):
        pieces = parts[label]
        commands = _eliminate_local_channels(
            [c for p in pieces for c in p.commands], local)
        agents.append(AgentInstance(label, AgentPattern(
            name='+'.join(p.name for p in pieces),
            qubit_sort=utils.flatten([p.qubit_sort for p in pieces]),
            channel_sort=utils.flatten([[c for c in p.channel_sort if c not in local]
                                        for p in pieces]),
            commands=commands,
            classical_inputs=utils.flatten([p.classical_inputs for p in pieces]),
        )))

    resources = []
    qubit_config = []
    for side, tag, net in ((1, t1, n1), (2, t2, n2)):
        resources.append(net.resource.rename(lambda q, tag=tag: _tag_qubit(tag, _RESOURCE, q)))
        for r, (label, q) in net.config.qubit_pairs:
            qubit_config.append((_tag_qubit(tag, _RESOURCE, r),
                                 (merged_label(side, label), _tag_qubit(tag, label, q))))
    resource = composer.merge_patterns(resources[0], resources[1], name='+'.join(
        p.name for p in (n1.resource, n2.resource) if p.name) or None)

    return NetworkDef(
        name=name or f"{n2.name}.{n1.name}",
        resource=resource,
        agents=agents,
        config=NetworkConfig(qubit_config, channel_pairs),
    )


def network_graph(defn):
    """Agents as nodes, channel pairs as edges from the sending side."""
    graph = nx.MultiDiGraph()
    for a in defn.agents:
        p = a.pattern
        graph.add_node(a.label, label=f"{a.label}: {p.name} sort={list(p.qubit_sort)}")
    for (a, x), (b, y) in defn.config.channel_pairs:
        sends = any(c.distributed and c.channel == x and isinstance(c, (cmds.Send, cmds.QSend))
                    for c in defn.agent(a).pattern.commands)
        source, target = ((a, x), (b, y)) if sends else ((b, y), (a, x))
        graph.add_edge(source[0], target[0], label=f"{source[0]}.{source[1]} -> "
                                                   f"{target[0]}.{target[1]}")
    return graph


def schedules(defn):
    """Every round-robin order of the agents."""
    return [list(p) for p in itertools.permutations(defn.labels)]
