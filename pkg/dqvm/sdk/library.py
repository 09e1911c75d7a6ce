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
"""Builtin patterns and networks.

Every entry carries its expected semantics, computed with the dense oracle
matrices rather than with the interpreter.
"""
from dataclasses import dataclass, field
import logging
import typing

import numpy as np

from dqvm.sdk import assets
from dqvm.sdk import commands as cmds
from dqvm.sdk import composer
from dqvm.sdk import exceptions
from dqvm.sdk import network
from dqvm.sdk import oracle
from dqvm.sdk import patterns
from dqvm.sdk.sexpr import Atom, parse_sexpr

logger = logging.getLogger(__name__)

HADAMARD = '((?i ?o) (?i) (?o) ((E ?i ?o) (M ?i 0) (X ?o (s ?i))))'
J = '((?i ?o) (?i) (?o) ((E ?i ?o) (M ?i -alpha) (X ?o (s ?i))))'
IDENTITY = '((?q) (?q) (?q) ())'
CZ = '((1 2) (1 2) (1 2) ((E 1 2)))'


def _pattern(text, name):
    return patterns.parse_pattern_def(parse_sexpr(text), name=name)


def _commands(text, allow_distributed=False):
    return cmds.parse_command_sequence(parse_sexpr(text), allow_distributed)


def h_subpattern(i, o):
    """Commands moving qubit i onto auxiliary o through a Hadamard."""
    return [cmds.Entangle(i, o), cmds.Measure(i, cmds.Angle(0)),
            cmds.CorrectX(o, cmds.Outcome(i))]


def identity_pattern():
    return _pattern(IDENTITY, 'I')


def hadamard_pattern():
    return _pattern(HADAMARD, 'H')


def j_pattern(alpha=0.0):
    return patterns.instantiate_params(_pattern(J, 'J'), {'alpha': alpha})


def cz_pattern():
    return _pattern(CZ, 'CZ')


def cx_composition():
    """(I ⊗ H) then CZ then (I ⊗ H), built with the seq/par shortcuts."""
    ih = composer.par_compose(identity_pattern(), hadamard_pattern())
    return composer.seq_all([ih, cz_pattern(), ih], name='CX')


def cx_explicit():
    """The same CNOT as an explicit composition graph H -> CZ -> H."""
    expr = composer.CompositionExpr(name='CX')
    expr.add('h1', hadamard_pattern()).add('cz', cz_pattern()).add('h2', hadamard_pattern())
    expr.link('h1.?o', 'cz.2')
    expr.link('cz.2', 'h2.?i')
    return expr


def _check_size(n, minimum=1):
    if n < minimum:
        raise ValueError(f"Size must be at least {minimum}, got {n}")


def ghz_pattern(n=3):
    """GHZ state on ?q1..?qn: each new qubit is an H sub-pattern off an entangled auxiliary."""
    _check_size(n)
    qubits = [f"?q{k}" for k in range(1, n + 1)]
    hats = [f"?h{k}" for k in range(2, n + 1)]
    commands = []
    for k in range(2, n + 1):
        hat = f"?h{k}"
        commands.append(cmds.Entangle(f"?q{k - 1}", hat))
        commands += h_subpattern(hat, f"?q{k}")
    return patterns.Pattern(qubits + hats, (), qubits, commands, name='GHZ')


def ghz_measurement_commands(qubits, hats):
    """Measure qubits in the GHZ basis; hats[k - 1] is the auxiliary of qubits[k]."""
    commands = []
    for k in range(len(qubits) - 1, 0, -1):
        commands += h_subpattern(qubits[k], hats[k - 1])
        commands.append(cmds.Entangle(qubits[k - 1], hats[k - 1]))
    commands.append(cmds.Measure(qubits[0], cmds.Angle(0)))
    commands += [cmds.Measure(h, cmds.Angle(0)) for h in hats]
    return commands


def ghz_measurement_pattern(n=3):
    """GHZ-basis measurement of ?q1..?qn.

    The outcomes of ?q1, ?h2 .. ?hn select the GHZ basis state, see
    oracle.ghz_basis_state.
    """
    _check_size(n)
    qubits = [f"?q{k}" for k in range(1, n + 1)]
    hats = [f"?h{k}" for k in range(2, n + 1)]
    return patterns.Pattern(qubits + hats, qubits, (),
                            ghz_measurement_commands(qubits, hats), name='MGHZ')


def ghz_outcome_qubits(n):
    return ['?q1'] + [f"?h{k}" for k in range(2, n + 1)]


def ghzd_pattern(n=3):
    """Diagonal-basis GHZ state on ?g0..?g(n-1), a star around ?c."""
    _check_size(n)
    outputs = [f"?g{k}" for k in range(n)]
    commands = [cmds.Entangle('?c', g) for g in outputs[1:]]
    commands += h_subpattern('?c', outputs[0])
    return patterns.Pattern(['?c'] + outputs, (), outputs, commands, name='GHZD')


def _parse_agent(name, sort, channels, text):
    return network.AgentPattern(name, sort, channels, _commands(text, allow_distributed=True))


def tp_network():
    resource = _pattern('((2 3) () (2 3) ((E 2 3)))', 'E23')
    sender = _parse_agent('A', (1, 2), ('c1', 'c2'),
                          '((E 1 2) (M 1 0) (M 2 0) (send c1 (s 1)) (send c2 (s 2)))')
    receiver = _parse_agent('B', (3, ), ('d1', 'd2'),
                            '((recv d1 x1) (recv d2 x2) (Z 3 x1) (X 3 x2))')
    config = network.NetworkConfig(
        channel_pairs=[(('A', 'c1'), ('B', 'd1')), (('A', 'c2'), ('B', 'd2'))])
    return network.NetworkDef('TP', resource, [
        network.AgentInstance('A', sender),
        network.AgentInstance('B', receiver),
    ], config)


def _es_leader(n):
    bars = [f"?b{i}" for i in range(n + 1)]
    hats = [f"?h{i}" for i in range(1, n + 1)]
    commands = ghz_measurement_commands(bars, hats)
    commands.append(cmds.Send('ch0', cmds.Outcome(bars[0])))
    for i in range(1, n + 1):
        commands.append(cmds.Send(f"ch{i}", cmds.Sum(cmds.Outcome(h) for h in hats[:i])))
    return network.AgentPattern('L', bars, [f"ch{i}" for i in range(n + 1)], commands)


def es_network(n=2):
    """Entanglement swapping: Bell pairs to a hub measuring in the GHZ basis.

    Agent A0 applies X by the sign outcome; agent Ai applies Z by the parity of
    the first i auxiliary outcomes.
    """
    _check_size(n)
    pairs = []
    for i in range(n + 1):
        pairs += [cmds.Entangle(f"?a{i}", f"?b{i}")]
    names = [q for i in range(n + 1) for q in (f"?a{i}", f"?b{i}")]
    resource = patterns.Pattern(names, (), names, pairs, name='BELL')

    agents = [network.AgentInstance('L', _es_leader(n))]
    qubit_pairs, channel_pairs = [], []
    for i in range(n + 1):
        correction = 'X' if i == 0 else 'Z'
        agent = _parse_agent(f"A{i}", ('?q', ), ('ch', ),
                             f"((recv ch x) ({correction} ?q x))")
        agents.append(network.AgentInstance(f"A{i}", agent))
        qubit_pairs += [(f"?b{i}", ('L', f"?b{i}")), (f"?a{i}", (f"A{i}", '?q'))]
        channel_pairs.append((('L', f"ch{i}"), (f"A{i}", 'ch')))
    return network.NetworkDef('ES', resource, agents,
                              network.NetworkConfig(qubit_pairs, channel_pairs))


def sc_network(n=2, resource=True):
    """Share control: spread the control qubit ?c of L over n agents.

    With resource=False the GHZ^D shares L.?q0 and Ai.?q are network inputs.
    """
    _check_size(n)
    leader_commands = [cmds.Entangle('?q0', '?c'), cmds.Measure('?q0', cmds.Angle(0))]
    leader_commands += [cmds.Send(f"ch{i}", cmds.Outcome('?q0')) for i in range(1, n + 1)]
    leader = network.AgentPattern('L', ('?c', '?q0'), [f"ch{i}" for i in range(1, n + 1)],
                                  leader_commands)
    agents = [network.AgentInstance('L', leader)]
    channel_pairs = []
    for i in range(1, n + 1):
        commands = [cmds.Recv('ch', 'x')] + h_subpattern('?q', '?o') + [
            cmds.CorrectX('?o', cmds.Input('x'))]
        agents.append(network.AgentInstance(
            f"A{i}", network.AgentPattern('A', ('?q', ), ('ch', ), commands)))
        channel_pairs.append((('L', f"ch{i}"), (f"A{i}", 'ch')))

    if resource:
        ghzd = ghzd_pattern(n + 1)
        qubit_pairs = [('?g0', ('L', '?q0'))] + [
            (f"?g{i}", (f"A{i}", '?q')) for i in range(1, n + 1)]
    else:
        ghzd = patterns.Pattern((), (), (), (), name='EMPTY')
        qubit_pairs = []
    return network.NetworkDef('SC', ghzd, agents,
                              network.NetworkConfig(qubit_pairs, channel_pairs))


def sc_compose_es(n=2):
    """SC after ES: the ES hub, ES agent A0 and the SC leader become one agent L."""
    agent_pairs = {'L': 'L', 'A0': 'L'}
    qubit_pairs = [(('A0', '?q'), ('L', '?q0'))]
    for i in range(1, n + 1):
        agent_pairs[f"A{i}"] = f"A{i}"
        qubit_pairs.append(((f"A{i}", '?q'), (f"A{i}", '?q')))
    return network.compose_networks(es_network(n), sc_network(n, resource=False),
                                     agent_pairs, qubit_pairs, name='SC-ES')


# expected semantics

def _no_qubits(*args):
    return []


def _controlled_copy(vector, n):
    """a|0> + b|1>  ->  a|0..0> + b|1..1> on n + 1 qubits."""
    vector = np.asarray(vector, dtype=complex)
    result = np.zeros(2 ** (n + 1), dtype=complex)
    result[0], result[-1] = vector[0], vector[1]
    return result


@dataclass
class ProtocolEntry:
    name: str
    kind: str
    build: typing.Callable
    description: str
    defaults: typing.Tuple = ()
    # (parameter name, parser)
    params: typing.Tuple = ()
    # unitary(*args) for unitary patterns
    unitary: typing.Optional[typing.Callable] = None
    # expected(input vector, *args) -> output vector
    expected: typing.Optional[typing.Callable] = None
    # inputs(*args) / outputs(*args) -> [(agent label, qubit name)] for networks
    inputs: typing.Callable = field(default_factory=lambda: _no_qubits)
    outputs: typing.Callable = field(default_factory=lambda: _no_qubits)
    # composition graph, when the pattern is built from one
    graph: typing.Optional[typing.Callable] = None

    def parse_args(self, texts):
        if len(texts) > len(self.params):
            raise ValueError(f"{self.name} takes at most {len(self.params)} arguments")
        args = list(self.defaults)
        for k, text in enumerate(texts):
            args[k] = self.params[k][1](text)
        return args

    def __call__(self, *args):
        return self.build(*(args or self.defaults))


def _angle(text):
    angle = cmds.parse_angle(Atom(text))
    if isinstance(angle, cmds.AngleParam):
        raise ValueError(f"Invalid angle '{text}'")
    return angle.value


def _size(text):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"Invalid size '{text}'")


def _es_outputs(n=2):
    return [(f"A{i}", '?q') for i in range(n + 1)]


def _sc_outputs(n=2):
    return [('L', '?c')] + [(f"A{i}", '?o') for i in range(1, n + 1)]


def _sc_es_outputs(n=2):
    return [('L', '?SC.L.c')] + [(f"A{i}", f"?SC.A{i}.o") for i in range(1, n + 1)]


_ENTRIES = [
    ProtocolEntry(
        'I', assets.PATTERN, identity_pattern,
        "Identity on one qubit: `((?q) (?q) (?q) ())`.",
        unitary=lambda: oracle.I2),
    ProtocolEntry(
        'H', assets.PATTERN, hadamard_pattern,
        "Hadamard gate: entangle the input with an auxiliary, measure the input at "
        "angle 0 and correct the auxiliary with `X`.",
        unitary=lambda: oracle.H),
    ProtocolEntry(
        'J', assets.PATTERN, j_pattern,
        "`J(alpha)` rotation, measuring the input at `-alpha`. `J(0)` is the Hadamard gate.",
        defaults=(0.0, ), params=(('alpha', _angle), ),
        unitary=oracle.j_matrix),
    ProtocolEntry(
        'CZ', assets.PATTERN, cz_pattern,
        "Controlled-Z on the concrete qubits 1 and 2: a single `E` command.",
        unitary=lambda: oracle.CZ),
    ProtocolEntry(
        'CX', assets.PATTERN, cx_composition,
        "Controlled-X compiled as `(I ⊗ H) ∘ CZ ∘ (I ⊗ H)` with the sequential and "
        "parallel shortcuts.",
        unitary=lambda: oracle.CNOT, graph=cx_explicit),
    ProtocolEntry(
        'GHZ', assets.PATTERN, ghz_pattern,
        "Preparation of the `n`-qubit GHZ state `(|0..0> + |1..1>)/√2`, no inputs.",
        defaults=(3, ), params=(('n', _size), ),
        expected=lambda vector, n=3: oracle.ghz(n)),
    ProtocolEntry(
        'MGHZ', assets.PATTERN, ghz_measurement_pattern,
        "Destructive measurement of `n` qubits in the GHZ basis, `2n - 1` measurements.",
        defaults=(3, ), params=(('n', _size), )),
    ProtocolEntry(
        'GHZD', assets.PATTERN, ghzd_pattern,
        "Preparation of the diagonal-basis GHZ state, a star graph plus one Hadamard "
        "sub-pattern. Deterministic, usable as a network resource.",
        defaults=(3, ), params=(('n', _size), ),
        expected=lambda vector, n=3: oracle.ghz_diagonal(n)),
    ProtocolEntry(
        'TP', assets.NETWORK, tp_network,
        "Teleportation from agent `A` (qubits 1, 2) to agent `B` (qubit 3) over a "
        "preshared `E 2 3`, with two classical channels.",
        expected=lambda vector: np.asarray(vector, dtype=complex),
        inputs=lambda: [('A', 1)], outputs=lambda: [('B', 3)]),
    ProtocolEntry(
        'ES', assets.NETWORK, es_network,
        "Entanglement swapping: `n + 1` Bell pairs shared with a hub `L` that measures its "
        "halves in the GHZ basis; agents `A0..An` end up in a diagonal-basis GHZ state.",
        defaults=(2, ), params=(('n', _size), ),
        expected=lambda vector, n=2: oracle.ghz_diagonal(n + 1),
        outputs=_es_outputs),
    ProtocolEntry(
        'SC', assets.NETWORK, sc_network,
        "Share control: the control qubit `L.?c` is copied in the computational basis to "
        "agents `A1..An` using a diagonal-basis GHZ resource.",
        defaults=(2, ), params=(('n', _size), ),
        expected=lambda vector, n=2: _controlled_copy(vector, n),
        inputs=lambda n=2: [('L', '?c')], outputs=_sc_outputs),
    ProtocolEntry(
        'SC-ES', assets.NETWORK, sc_compose_es,
        "Share control composed after entanglement swapping: no preshared GHZ state, "
        "only Bell pairs with the leader.",
        defaults=(2, ), params=(('n', _size), ),
        expected=lambda vector, n=2: _controlled_copy(vector, n),
        inputs=lambda n=2: [('L', '?SC.L.c')], outputs=_sc_es_outputs),
]

BUILTINS = {entry.name: entry for entry in _ENTRIES}


def get_entry(name):
    try:
        return BUILTINS[name.upper()]
    except KeyError:
        raise exceptions.DefinitionNotFound(name)


def parse_builtin(target):
    """``ES:3`` -> (entry, [3])."""
    name, *texts = target.split(':')
    entry = get_entry(name)
    try:
        return entry, entry.parse_args(texts)
    except ValueError as e:
        raise exceptions.GrammarError(str(e), target)


def build(target):
    entry, args = parse_builtin(target)
    logger.debug(f"Building builtin {entry.name} with {args}")
    try:
        return entry.build(*args)
    except ValueError as e:
        raise exceptions.GrammarError(str(e), target)


def get_all():
    return list(BUILTINS)
