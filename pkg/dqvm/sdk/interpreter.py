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
"""Execution of concrete command sequences against an environment."""
import logging
import math

import numpy as np

from dqvm.sdk import commands as cmds
from dqvm.sdk import exceptions
from dqvm.sdk import state as st
from dqvm.sdk.sexpr import Atom, ListExpr, build

logger = logging.getLogger(__name__)

ENUMERATE = 'enumerate'
SAMPLE = 'sample'
MODES = (ENUMERATE, SAMPLE)


class Environment:
    def __init__(self, quantum=None, classical=None, rng=None):
        self.quantum = quantum if quantum is not None else st.QuantumState()
        self.classical = classical if classical is not None else st.ClassicalState()
        self.rng = rng

    def replace(self, quantum=None, classical=None):
        return Environment(
            quantum if quantum is not None else self.quantum,
            classical if classical is not None else self.classical,
            self.rng,
        )


class Branch:
    def __init__(self, outcomes, probability, final):
        self.outcomes = dict(outcomes)
        self.probability = probability
        self.final = final

    def vector(self, qubit_order):
        return st.reference_full_state(self.final.quantum, qubit_order)

    def _items(self):
        return [
            ListExpr([Atom('outcomes')] + [build([q, b]) for q, b in self.outcomes.items()]),
            build(['prob', f"{self.probability:.9f}"]),
            st.state_to_sexpr(self.final.quantum),
        ]

    def to_sexpr(self):
        return ListExpr([Atom('branch')] + self._items())

    def to_dict(self):
        return {
            'outcomes': {str(q): b for q, b in self.outcomes.items()},
            'probability': float(self.probability),
            'inputs': dict(self.final.classical.inputs),
            'state': [
                {
                    'qubits': list(t.qubits),
                    'amplitudes': [[float(a.real), float(a.imag)] for a in t.amplitudes],
                }
                for t in self.final.quantum.tangles
            ],
        }


class BranchList(list):
    """Branches in exploration order; `pruned` lists the outcome prefixes cut off."""

    def __init__(self, branches=()):
        super().__init__(branches)
        self.pruned = []

    @property
    def total_probability(self):
        return sum(b.probability for b in self)


def eval_signal(classical, signal):
    if signal is None:
        return 0
    if isinstance(signal, cmds.Const):
        return signal.bit
    if isinstance(signal, cmds.Outcome):
        try:
            return classical.outcomes[signal.qubit]
        except KeyError:
            raise exceptions.UnboundOutcome(signal.qubit)
    if isinstance(signal, cmds.Input):
        try:
            return classical.inputs[signal.name]
        except KeyError:
            raise exceptions.UnboundInput(signal.name)
    return sum(eval_signal(classical, t) for t in signal.terms) % 2


def eval_angle(classical, angle, s=None, t=None):
    if isinstance(angle, cmds.AngleParam):
        raise exceptions.MissingParam(f"Angle parameter '{angle.name}' is not instantiated")
    value = angle.value
    if eval_signal(classical, s):
        value = -value
    if eval_signal(classical, t):
        value += math.pi
    return cmds.normalize_angle(value)


def _measure(env, command, outcome, tol):
    angle = eval_angle(env.classical, command.angle, command.s, command.t)
    if outcome is None:
        if env.rng is None:
            raise ValueError("Sampling a measurement requires a random generator")
        p0, p1 = st.measurement_probabilities(env.quantum, command.qubit, angle)
        if p1 < tol:
            outcome = 0
        elif p0 < tol:
            outcome = 1
        else:
            outcome = 0 if env.rng.random() < p0 else 1
    quantum, probability = st.project_measure(env.quantum, command.qubit, angle, outcome,
                                              tol=tol)
    classical = env.classical.with_outcome(command.qubit, outcome)
    return env.replace(quantum, classical), probability


def exec_command(env, command, forced_outcome=None, tol=st.PRUNE_TOL):
    if command.distributed:
        raise exceptions.CommunicationInLocalRun(
            f"Command {command.to_sexpr()} needs a network")

    if isinstance(command, cmds.Entangle):
        return env.replace(st.apply_cz(env.quantum, command.q1, command.q2)), 1.0

    if isinstance(command, (cmds.CorrectX, cmds.CorrectZ)):
        # the qubit must exist even when the correction is skipped
        env.quantum.index_of(command.qubit)
        if not eval_signal(env.classical, command.signal):
            return env, 1.0
        which = st.X if isinstance(command, cmds.CorrectX) else st.Z
        return env.replace(st.apply_pauli(env.quantum, command.qubit, which)), 1.0

    return _measure(env, command, forced_outcome, tol)


def _input_items(inputs):
    for key, amplitudes in (inputs or {}).items():
        yield (key if isinstance(key, tuple) else (key, )), amplitudes


def initial_environment(commands, inputs=None, input_bits=None, space=(), rng=None,
                        tol=st.DEFAULT_TOL):
    """Allocate input tangles, then |+> for every other qubit in use.

    Auxiliary qubits must be entangled before any other command touches them.
    """
    quantum = st.QuantumState()
    for qubits, amplitudes in _input_items(inputs):
        quantum = st.init_tangle(quantum, qubits, amplitudes, tol=tol)

    first_use = {}
    for command in commands:
        if command.distributed:
            continue
        for q in command.qubits:
            first_use.setdefault(q, command)
    for q, command in first_use.items():
        if q in quantum:
            continue
        if not isinstance(command, cmds.Entangle):
            raise exceptions.UnknownQubit(
                f"Qubit {q} is neither an input nor entangled before {command.to_sexpr()}")
        quantum = st.init_qubit(quantum, q, st.PLUS)
    for q in space:
        if q not in quantum:
            quantum = st.init_qubit(quantum, q, st.PLUS)

    classical = st.ClassicalState(inputs=input_bits)
    return Environment(quantum, classical, rng)


def explore(env, commands, mode=ENUMERATE, tol=st.PRUNE_TOL):
    """Run commands from env; enumerate forks depth-first, outcome 0 first."""
    branches = BranchList()
    stack = [(env, 0, 1.0)]
    while stack:
        env, index, probability = stack.pop()
        forked = False
        while index < len(commands):
            command = commands[index]
            index += 1
            if mode == ENUMERATE and isinstance(command, cmds.Measure):
                forks = measurement_forks(env, command, tol)
                for outcome in (1, 0):
                    if outcome not in forks:
                        prefix = {**env.classical.outcomes, command.qubit: outcome}
                        logger.debug(f"Pruned branch {prefix}")
                        branches.pruned.append(prefix)
                        continue
                    child, p = forks[outcome]
                    stack.append((child, index, probability * p))
                forked = True
                break
            env, p = exec_command(env, command, tol=tol)
            probability *= p
        if not forked:
            branches.append(Branch(env.classical.outcomes, probability, env))
    return branches


def measurement_forks(env, command, tol=st.PRUNE_TOL):
    """Both outcomes of a measurement, keyed by outcome; improbable ones are left out."""
    angle = eval_angle(env.classical, command.angle, command.s, command.t)
    probabilities = st.measurement_probabilities(env.quantum, command.qubit, angle)
    forks = {}
    for outcome, p in enumerate(probabilities):
        if p < tol:
            continue
        forks[outcome] = exec_command(env, command, forced_outcome=outcome, tol=tol)
    return forks


def run_sequence(commands, inputs=None, input_bits=None, mode=ENUMERATE, seed=None,
                 space=(), tol=st.DEFAULT_TOL, prune=st.PRUNE_TOL):
    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}'")
    rng = np.random.default_rng(seed) if mode == SAMPLE else None
    env = initial_environment(commands, inputs, input_bits, space=space, rng=rng, tol=tol)
    return explore(env, list(commands), mode=mode, tol=prune)
