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
"""Patterns (V, I, O, commands), their validation and the assembler.

Inputs and outputs are ordered; commands are stored in execution order.
"""
from dataclasses import dataclass, field
import logging
import typing

import numpy as np

from dqvm.sdk import commands as cmds
from dqvm.sdk import exceptions
from dqvm.sdk import interpreter
from dqvm.sdk import state as st
from dqvm.sdk import utils
from dqvm.sdk.sexpr import Atom, ListExpr, build

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pattern:
    space: typing.Tuple
    inputs: typing.Tuple
    outputs: typing.Tuple
    commands: typing.Tuple
    params: typing.Tuple = ()
    name: typing.Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        for attr in ('space', 'inputs', 'outputs', 'commands', 'params'):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))

    @property
    def names(self):
        """Every qubit name of the pattern, space first, in order of appearance."""
        used = [c.qubits for c in self.commands]
        used += [s.outcome_qubits() for c in self.commands for s in c.signals()]
        return utils.flatten([self.space, self.inputs, self.outputs] + used)

    @property
    def is_concrete(self):
        return not any(cmds.is_variable(n) for n in self.names)

    def measured(self):
        return [c.qubit for c in self.commands if isinstance(c, cmds.Measure)]

    def angle_params(self):
        return utils.flatten([
            [c.angle.name] for c in self.commands
            if isinstance(c, cmds.Measure) and isinstance(c.angle, cmds.AngleParam)
        ])

    def rename(self, mapping, name=None):
        """Rename qubits with a dict or a callable; unmapped names are kept."""
        def lookup(q):
            return cmds._lookup(mapping, q)

        return Pattern(
            space=utils.flatten([[lookup(q) for q in self.space]]),
            inputs=[lookup(q) for q in self.inputs],
            outputs=[lookup(q) for q in self.outputs],
            commands=cmds.rename_commands(self.commands, qubits=lookup),
            params=self.params,
            name=name or self.name,
        )

    def to_sexpr(self):
        return ListExpr([
            build(self.space),
            build(self.inputs),
            build(self.outputs),
            cmds.commands_to_sexpr(self.commands),
        ])

    def to_definition(self):
        return ListExpr([Atom('defpattern'), Atom(self.name or 'anonymous'),
                         build(self.params)] + list(self.to_sexpr()))

    def __str__(self):
        return str(self.to_sexpr())


@dataclass(frozen=True)
class Violation:
    index: typing.Optional[int]
    message: str

    def __str__(self):
        if self.index is None:
            return self.message
        return f"command {self.index}: {self.message}"


def validate_pattern(p):
    violations = []

    def report(index, message):
        violations.append(Violation(index, message))

    space = set(p.space)
    names = p.names
    kinds = {cmds.is_variable(n) for n in names}
    if len(kinds) > 1:
        report(None, "qubit names mix variables and concrete references")
    for q in p.inputs:
        if q not in space:
            report(None, f"input {q} not in computation space")
    for q in p.outputs:
        if q not in space:
            report(None, f"output {q} not in computation space")
    if len(set(p.inputs)) != len(p.inputs):
        report(None, "duplicate input qubit")
    if len(set(p.outputs)) != len(p.outputs):
        report(None, "duplicate output qubit")

    outputs = set(p.outputs)
    inputs = set(p.inputs)
    declared = set(p.params)
    measured = set()
    touched = set()
    for index, command in enumerate(p.commands):
        if command.distributed:
            report(index, "communication command in pattern")
            continue
        for signal in command.signals():
            for q in signal.outcome_qubits():
                if q not in measured:
                    report(index, f"signal from unmeasured qubit {q}")
        for q in command.qubits:
            if q not in space:
                report(index, f"qubit {q} not in computation space")
            if q in measured:
                report(index, f"qubit {q} used after measurement")
            if q not in inputs and q not in touched and not isinstance(command, cmds.Entangle):
                report(index, f"auxiliary qubit {q} used before entanglement")
            touched.add(q)
        if isinstance(command, cmds.Measure):
            if command.qubit in outputs:
                report(index, f"output qubit measured: {command.qubit}")
            if isinstance(command.angle, cmds.AngleParam) and command.angle.name not in declared:
                report(index, f"undeclared angle parameter {command.angle.name}")
            measured.add(command.qubit)

    for q in p.space:
        if q not in outputs and q not in measured:
            report(None, f"non-output qubit never measured: {q}")
    return violations


def check_pattern(p):
    violations = validate_pattern(p)
    if violations:
        raise exceptions.InvalidPattern(violations, name=p.name)
    return p


@dataclass(frozen=True)
class AssembledSequence:
    commands: typing.Tuple
    inputs: typing.Tuple
    outputs: typing.Tuple
    space: typing.Tuple = ()
    mapping: typing.Dict = field(default_factory=dict, compare=False)

    def to_sexpr(self):
        return ListExpr([
            build(['inputs'] + list(self.inputs)),
            build(['outputs'] + list(self.outputs)),
            cmds.commands_to_sexpr(self.commands),
        ])


def assemble(p, fresh=None):
    """Replace every variable by a unique fresh integer reference.

    Variables are numbered in order of first appearance; concrete names are
    claimed on the allocator and pass through unchanged.
    """
    fresh = fresh if fresh is not None else utils.FreshReferences()
    mapping = {}
    for name in p.names:
        if cmds.is_variable(name):
            mapping[name] = fresh()
        else:
            fresh.claim(name)
    assembled = p.rename(mapping) if mapping else p
    logger.debug(f"Assembled pattern {p.name or ''} with {mapping}")
    return AssembledSequence(assembled.commands, assembled.inputs, assembled.outputs,
                             assembled.space, mapping)


def instantiate_params(p, values):
    values = dict(values)
    unknown = [k for k in values if k not in p.params]
    if unknown:
        raise exceptions.UnknownParam(f"Unknown angle parameters {unknown} for pattern {p.name}")
    missing = [k for k in p.params if k not in values]
    if missing:
        raise exceptions.MissingParam(f"Missing angle parameters {missing} for pattern {p.name}")

    def bind(command):
        if isinstance(command, cmds.Measure) and isinstance(command.angle, cmds.AngleParam):
            return command.with_angle(command.angle.bind(values[command.angle.name]))
        return command

    return Pattern(p.space, p.inputs, p.outputs, [bind(c) for c in p.commands], (), p.name)


def _qubit_list(expr, what):
    if not isinstance(expr, ListExpr):
        raise exceptions.ShapeError(f"{what} must be a list of qubit names", expr)
    return [cmds.parse_qubit_name(item) for item in expr]


def parse_pattern_def(expr, params=None, name=None):
    """Parse ``(V I O commands)``; angle parameters default to those used."""
    if not isinstance(expr, ListExpr) or len(expr) != 4:
        raise exceptions.ShapeError("Pattern must be a list (V I O commands)", expr)
    space = _qubit_list(expr[0], "Computation space")
    inputs = _qubit_list(expr[1], "Inputs")
    outputs = _qubit_list(expr[2], "Outputs")
    commands = cmds.parse_command_sequence(expr[3])
    pattern = Pattern(space, inputs, outputs, commands, name=name)
    if params is None:
        params = pattern.angle_params()
    return Pattern(space, inputs, outputs, commands, params, name)


def interface(p):
    """Names bound by position in a call: inputs, then outputs that are not inputs."""
    return utils.ordered_union(p.inputs, p.outputs)


def inline(p, args, fresh_name):
    """Commands of p called on args, and the names of its working qubits.

    args bind the interface, optionally followed by the remaining qubits in
    space order; unbound names are made fresh.
    """
    if p.params:
        raise exceptions.MissingParam(f"Pattern {p.name} has unbound angle parameters")
    bound = interface(p)
    others = [q for q in p.names if q not in bound]
    if len(args) not in (len(bound), len(bound) + len(others)):
        raise exceptions.ArityMismatch(
            f"Pattern {p.name} takes {len(bound)} or {len(bound) + len(others)} qubits, "
            f"got {len(args)}")
    mapping = dict(zip(bound + others, args))
    for q in others:
        if q not in mapping:
            mapping[q] = fresh_name()
    return cmds.rename_commands(p.commands, qubits=mapping), [mapping[q] for q in others]


def input_map(qubits, inputs):
    """Map qubits to per-qubit amplitudes, or to one joint vector over all of them."""
    qubits = tuple(qubits)
    if not qubits:
        return {}
    if inputs is None:
        raise exceptions.NonNormalizedInput(f"Input qubits {list(qubits)} need a state")
    array = np.asarray(inputs, dtype=complex)
    if array.ndim == 2:
        if array.shape != (len(qubits), 2):
            raise exceptions.LengthMismatch(f"Expected {len(qubits)} single-qubit input states")
        return dict(zip(qubits, array))
    if array.size != 2 ** len(qubits):
        raise exceptions.LengthMismatch(
            f"Joint input state on {len(qubits)} qubits needs {2 ** len(qubits)} amplitudes")
    return {qubits: array}


def run_pattern(p, inputs=None, input_bits=None, mode=interpreter.ENUMERATE, seed=None,
                tol=st.DEFAULT_TOL):
    """Assemble and run a pattern; inputs bind the pattern inputs in order.

    Returns the assembled sequence and the branches.
    """
    assembled = assemble(p)
    branches = interpreter.run_sequence(assembled.commands,
                                        input_map(assembled.inputs, inputs),
                                        input_bits, mode=mode, seed=seed,
                                        space=assembled.space, tol=tol)
    return assembled, branches
