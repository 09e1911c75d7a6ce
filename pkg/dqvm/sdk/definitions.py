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
"""Definition files.

A file holds top-level forms::

    (defpattern NAME (params...) V I O commands)
    (defcompose NAME (compose (use P as n1 [angle...]) ... (link (n1.?o n2.?i) ...)))
    (defcompose NAME (seq P1 P2 ...))      (defcompose NAME (par P1 P2 ...))
    (defagent NAME (Q) (channels) (commands) [(inputs name...)])
    (defnetwork NAME (resource P) (agent LABEL A) ...
                (config (qubits (r.q LABEL.q) ...) (channels (L1.c L2.d) ...)))

Pattern references name a definition of the file or a builtin (``J:pi/2``).
Agents may call patterns with ``(do P q...)``. Definitions are built lazily,
in any order.
"""
from dataclasses import dataclass
import logging

from dqvm.sdk import assets
from dqvm.sdk import commands as cmds
from dqvm.sdk import composer
from dqvm.sdk import exceptions
from dqvm.sdk import library
from dqvm.sdk import network
from dqvm.sdk import patterns
from dqvm.sdk import utils
from dqvm.sdk.sexpr import Atom, ListExpr, is_atom, parse_all

logger = logging.getLogger(__name__)


@dataclass
class Definition:
    kind: str
    name: str
    expr: ListExpr
    index: int


@dataclass(frozen=True)
class Diagnostic:
    name: str
    message: str

    def __str__(self):
        return f"{self.name}: {self.message}"

    def to_dict(self):
        return {'name': self.name, 'message': self.message}


def _atom_text(expr, what):
    if not isinstance(expr, Atom):
        raise exceptions.ShapeError(f"{what} must be an atom", expr)
    return expr.text


def _list(expr, what):
    if not isinstance(expr, ListExpr):
        raise exceptions.ShapeError(f"{what} must be a list", expr)
    return expr


def _head(expr):
    if isinstance(expr, ListExpr) and len(expr) and isinstance(expr[0], Atom):
        return expr[0].text.lower()
    return None


def _split_channel(text):
    label, sep, channel = text.partition('.')
    if not sep or not label or not channel:
        raise exceptions.InvalidChannelPair(f"Channel '{text}' is not agent-qualified")
    return label, channel


class Program:
    """Registry of the definitions of one file."""

    def __init__(self, source=None):
        self.source = source
        self._definitions = {}
        self._built = {}
        self._building = []

    def add(self, expr):
        expr = _list(expr, "Definition")
        kind = assets.from_form(_head(expr) or '')
        if kind is None:
            raise exceptions.ShapeError("Unknown definition form", expr)
        if len(expr) < 2:
            raise exceptions.ShapeError("Definition needs a name", expr)
        name = _atom_text(expr[1], "Definition name")
        if name in self._definitions:
            raise exceptions.DuplicateDefinition(f"'{name}' is defined twice")
        self._definitions[name] = Definition(kind, name, expr, len(self._definitions))
        return self

    def names(self):
        return list(self._definitions)

    def definitions(self):
        return list(self._definitions.values())

    def __contains__(self, name):
        return name in self._definitions

    def get(self, name):
        try:
            return self._definitions[name]
        except KeyError:
            raise exceptions.DefinitionNotFound(name)

    def kind(self, name):
        return self.get(name).kind

    def build(self, name):
        """The value of a definition: Pattern, CompositionExpr, AgentPattern or NetworkDef."""
        if name in self._built:
            return self._built[name]
        if name in self._building:
            cycle = self._building[self._building.index(name):] + [name]
            raise exceptions.CycleDetected(cycle)
        definition = self.get(name)
        self._building.append(name)
        try:
            logger.debug(f"Building {definition.kind} '{name}'")
            value = _BUILDERS[definition.kind](self, definition)
        finally:
            self._building.pop()
        self._built[name] = value
        return value

    # pattern references

    def pattern(self, reference, args=()):
        """Pattern named by a definition of this file or a builtin, params bound by args."""
        if args and reference not in self._definitions:
            reference = ':'.join([reference] + [_atom_text(a, "Argument") for a in args])
            args = ()
        if reference in self._definitions:
            value = self.build(reference)
            if isinstance(value, composer.CompositionExpr):
                value = composer.compile_composition(value, name=reference)
            if not isinstance(value, patterns.Pattern):
                raise exceptions.ShapeError(f"'{reference}' is not a pattern")
        else:
            entry, _ = library.parse_builtin(reference)
            if entry.kind != assets.PATTERN:
                raise exceptions.ShapeError(f"Builtin '{reference}' is not a pattern")
            value = library.build(reference)
        if args:
            if len(args) != len(value.params):
                raise exceptions.MissingParam(
                    f"Pattern {reference} takes {len(value.params)} angles, got {len(args)}")
            values = {}
            for param, arg in zip(value.params, args):
                angle = cmds.parse_angle(arg)
                if isinstance(angle, cmds.AngleParam):
                    raise exceptions.BadAngle("Angle argument must be a value", arg)
                values[param] = angle.value
            value = patterns.instantiate_params(value, values)
        return value

    def _pattern_call(self, expr):
        if isinstance(expr, Atom):
            return self.pattern(expr.text)
        expr = _list(expr, "Pattern reference")
        if not len(expr):
            raise exceptions.ShapeError("Empty pattern reference", expr)
        return self.pattern(_atom_text(expr[0], "Pattern name"), expr.items[1:])

    def agent(self, name):
        value = self.build(name)
        if not isinstance(value, network.AgentPattern):
            raise exceptions.ShapeError(f"'{name}' is not an agent")
        return value

    def network(self, name):
        value = self.build(name)
        if not isinstance(value, network.NetworkDef):
            raise exceptions.ShapeError(f"'{name}' is not a network")
        return value

    def validate(self):
        """Build every definition; one diagnostic per violation or error."""
        diagnostics = []
        for definition in self.definitions():
            try:
                value = self.build(definition.name)
                if isinstance(value, composer.CompositionExpr):
                    composer.compile_composition(value, name=definition.name)
                elif isinstance(value, patterns.Pattern):
                    for violation in patterns.validate_pattern(value):
                        diagnostics.append(Diagnostic(definition.name, str(violation)))
                elif isinstance(value, network.NetworkDef):
                    patterns.check_pattern(value.resource)
                    network.compile_network(value)
            except exceptions.InvalidPattern as e:
                diagnostics += [Diagnostic(definition.name, str(v)) for v in e.violations]
            except (exceptions.DefinitionNotFound, exceptions.GrammarError,
                    exceptions.PatternError, exceptions.CompositionError,
                    exceptions.NetworkError, exceptions.DefinitionError,
                    exceptions.StateError) as e:
                diagnostics.append(Diagnostic(definition.name, str(e)))
        return diagnostics


def _build_pattern(program, definition):
    expr = definition.expr
    if len(expr) != 7:
        raise exceptions.ShapeError("defpattern takes a name, params, V, I, O and commands",
                                    expr)
    params = [_atom_text(p, "Angle parameter") for p in _list(expr[2], "Parameters")]
    return patterns.parse_pattern_def(ListExpr(expr.items[3:]), params=params,
                                      name=definition.name)


def _build_composition(program, definition):
    expr = definition.expr
    if len(expr) != 3:
        raise exceptions.ShapeError("defcompose takes a name and one composition form", expr)
    body = _list(expr[2], "Composition")
    head = _head(body)
    if head in ('seq', 'par'):
        parts = [program._pattern_call(item) for item in body.items[1:]]
        if not parts:
            raise exceptions.ShapeError(f"'{head}' needs at least one pattern", body)
        combine = composer.seq_all if head == 'seq' else composer.par_all
        return combine(parts, name=definition.name)
    if head != 'compose':
        raise exceptions.ShapeError("Composition must be (compose ...), (seq ...) or (par ...)",
                                    body)

    composition = composer.CompositionExpr(name=definition.name)
    for item in body.items[1:]:
        item_head = _head(item)
        if item_head == 'use':
            if len(item) < 4 or not is_atom(item[2], 'as'):
                raise exceptions.ShapeError("Expected (use PATTERN as LABEL angle...)", item)
            reference = _atom_text(item[1], "Pattern name")
            label = _atom_text(item[3], "Node label")
            composition.add(label, program.pattern(reference, item.items[4:]))
        elif item_head == 'link':
            for pair in item.items[1:]:
                pair = _list(pair, "Link")
                if len(pair) != 2:
                    raise exceptions.ShapeError("Link is a pair of qualified names", pair)
                composition.link(_atom_text(pair[0], "Link end"),
                                 _atom_text(pair[1], "Link end"))
        else:
            raise exceptions.ShapeError("Expected (use ...) or (link ...)", item)
    return composition


def _agent_commands(program, expr, agent_name):
    commands = []
    calls = 0
    for item in _list(expr, "Agent commands"):
        if _head(item) == 'do':
            if len(item) < 2:
                raise exceptions.ArityError("(do PATTERN qubit...) needs a pattern", item)
            pattern = program.pattern(_atom_text(item[1], "Pattern name"))
            args = [cmds.parse_qubit_name(a) for a in item.items[2:]]
            fresh = utils.FreshNames(prefix=f"?{agent_name}.do{calls}.")
            inlined, _ = patterns.inline(pattern, args, fresh)
            commands += inlined
            calls += 1
        else:
            commands.append(cmds.parse_command(item, allow_distributed=True))
    return commands


def _agent_from(program, name, items):
    if len(items) not in (3, 4):
        raise exceptions.ShapeError("Agent takes (Q) (channels) (commands) [(inputs ...)]")
    sort = [cmds.parse_qubit_name(q) for q in _list(items[0], "Qubit sort")]
    channels = [_atom_text(c, "Channel name") for c in _list(items[1], "Channel sort")]
    commands = _agent_commands(program, items[2], name)
    inputs = []
    if len(items) == 4:
        inputs_expr = _list(items[3], "Classical inputs")
        if _head(inputs_expr) != 'inputs':
            raise exceptions.ShapeError("Expected (inputs name...)", inputs_expr)
        inputs = [_atom_text(n, "Input name") for n in inputs_expr.items[1:]]
    return network.AgentPattern(name, sort, channels, commands, inputs)


def _build_agent(program, definition):
    return _agent_from(program, definition.name, definition.expr.items[2:])


def _build_network(program, definition):
    resource = None
    agents = []
    qubit_pairs, channel_pairs = [], []
    for item in definition.expr.items[2:]:
        head = _head(item)
        if head == 'resource':
            if len(item) != 2 or resource is not None:
                raise exceptions.ShapeError("Expected one (resource PATTERN)", item)
            body = item[1]
            if isinstance(body, ListExpr) and len(body) == 4 and isinstance(body[0], ListExpr):
                resource = patterns.parse_pattern_def(body, name='resource')
            else:
                resource = program._pattern_call(body)
        elif head == 'agent':
            if len(item) == 3:
                label = _atom_text(item[1], "Agent label")
                pattern = program.agent(_atom_text(item[2], "Agent name"))
            elif len(item) in (5, 6):
                label = _atom_text(item[1], "Agent label")
                pattern = _agent_from(program, label, item.items[2:])
            else:
                raise exceptions.ShapeError("Expected (agent LABEL AGENT) or an inline agent",
                                            item)
            agents.append(network.AgentInstance(label, pattern))
        elif head == 'config':
            for section in item.items[1:]:
                section_head = _head(section)
                if section_head not in ('qubits', 'channels'):
                    raise exceptions.ShapeError("Expected (qubits ...) or (channels ...)",
                                                section)
                for pair in section.items[1:]:
                    pair = _list(pair, "Pair")
                    if len(pair) != 2:
                        raise exceptions.ShapeError("Pairs have two ends", pair)
                    left = _atom_text(pair[0], "Pair end")
                    right = _atom_text(pair[1], "Pair end")
                    if section_head == 'qubits':
                        owner, name = composer.split_qualified(left)
                        if owner != 'r':
                            raise exceptions.PairMismatch(
                                f"Qubit pairs start with a resource qubit r.NAME, got {left}")
                        qubit_pairs.append((name, composer.split_qualified(right)))
                    else:
                        channel_pairs.append((_split_channel(left), _split_channel(right)))
        else:
            raise exceptions.ShapeError("Expected (resource ...), (agent ...) or (config ...)",
                                        item)
    if resource is None:
        resource = patterns.Pattern((), (), (), (), name='EMPTY')
    return network.NetworkDef(definition.name, resource, agents,
                              network.NetworkConfig(qubit_pairs, channel_pairs))


_BUILDERS = {
    assets.PATTERN: _build_pattern,
    assets.COMPOSITION: _build_composition,
    assets.AGENT: _build_agent,
    assets.NETWORK: _build_network,
}


def load_program(text, source=None):
    program = Program(source)
    for expr in parse_all(text):
        program.add(expr)
    return program


def load_file(path):
    with open(path, encoding='utf-8') as fh:
        text = fh.read()
    return load_program(text, source=path)
