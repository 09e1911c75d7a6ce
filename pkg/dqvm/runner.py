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
"""Run configuration and dispatch of a run to the pattern or network machine."""
from dataclasses import dataclass, field
import logging
import math
import typing

from dqvm.sdk import composer
from dqvm.sdk import exceptions
from dqvm.sdk import interpreter
from dqvm.sdk import network
from dqvm.sdk import patterns
from dqvm.sdk import state as st
from dqvm.sdk.sexpr import Atom, ListExpr, build

logger = logging.getLogger(__name__)

REPORT = 'report'
SEXPR = 'sexpr'
JSON = 'json'
YAML = 'yaml'
FORMATS = (REPORT, SEXPR, JSON, YAML)

MAX_SEED = 2 ** 64

_SQRT_HALF = 1 / math.sqrt(2)

STATE_LITERALS = {
    '0': (1, 0),
    '1': (0, 1),
    '+': (_SQRT_HALF, _SQRT_HALF),
    '-': (_SQRT_HALF, -_SQRT_HALF),
    '−': (_SQRT_HALF, -_SQRT_HALF),
}


def parse_state(text):
    """``0``, ``1``, ``+``, ``-`` or an amplitude pair ``(a b)``; complex parts use ``j``."""
    text = text.strip()
    if text in STATE_LITERALS:
        return tuple(complex(a) for a in STATE_LITERALS[text])
    if text.startswith('(') and text.endswith(')'):
        parts = text[1:-1].split()
        if len(parts) == 2:
            try:
                return tuple(complex(p) for p in parts)
            except ValueError:
                pass
    raise exceptions.RunConfigError(
        f"Invalid state '{text}': expected 0, 1, +, - or an amplitude pair (a b)")


def _split_assignment(text, what):
    name, sep, value = text.partition('=')
    name, value = name.strip(), value.strip()
    if not sep or not name or not value:
        raise exceptions.RunConfigError(f"Invalid {what} '{text}': expected name=value")
    return name, value


def parse_inputs(assignments):
    """``["?i=+", "L.?c=(0.6 0.8)"]`` -> {name: amplitudes}."""
    inputs = {}
    for text in assignments or ():
        name, value = _split_assignment(text, 'input')
        if name in inputs:
            raise exceptions.RunConfigError(f"Input '{name}' is assigned twice")
        inputs[name] = parse_state(value)
    return inputs


def parse_classical_inputs(assignments):
    bits = {}
    for text in assignments or ():
        name, value = _split_assignment(text, 'classical input')
        if value not in ('0', '1'):
            raise exceptions.RunConfigError(f"Classical input '{name}' must be 0 or 1")
        bits[name] = int(value)
    return bits


@dataclass
class RunConfig:
    mode: str = interpreter.ENUMERATE
    seed: typing.Optional[int] = None
    # qubit name -> amplitudes
    inputs: typing.Dict = field(default_factory=dict)
    # classical input name -> bit
    classical_inputs: typing.Dict = field(default_factory=dict)
    tolerance: float = st.DEFAULT_TOL
    format: str = REPORT
    order: typing.Optional[typing.List[str]] = None
    channel_policy: str = network.BUFFERED

    def __post_init__(self):
        if self.mode not in interpreter.MODES:
            raise exceptions.RunConfigError(f"Unknown mode '{self.mode}'")
        if self.mode == interpreter.SAMPLE and self.seed is None:
            raise exceptions.RunConfigError("Sample mode needs a seed")
        if self.seed is not None and not 0 <= self.seed < MAX_SEED:
            raise exceptions.RunConfigError(f"Seed must be a 64-bit unsigned integer, "
                                            f"got {self.seed}")
        if not self.tolerance > 0:
            raise exceptions.RunConfigError(f"Tolerance must be positive, got {self.tolerance}")
        if self.format not in FORMATS:
            raise exceptions.RunConfigError(f"Unknown format '{self.format}'")
        if self.channel_policy not in network.CHANNEL_POLICIES:
            raise exceptions.RunConfigError(f"Unknown channel policy '{self.channel_policy}'")


@dataclass
class RunResult:
    target: str
    kind: str
    mode: str
    seed: typing.Optional[int]
    branches: interpreter.BranchList
    # qubit references that may hold the result, in output order
    outputs: typing.List
    compiled: typing.Any = None

    @property
    def total_probability(self):
        return self.branches.total_probability

    def to_sexpr(self):
        seed = 'none' if self.seed is None else self.seed
        return ListExpr([
            Atom('run'), Atom(self.target),
            build(['mode', self.mode]),
            build(['seed', seed]),
            ListExpr([Atom('branches')] + [b.to_sexpr() for b in self.branches]),
        ])

    def to_dict(self):
        return {
            'target': self.target,
            'kind': self.kind,
            'mode': self.mode,
            'seed': self.seed,
            'total_probability': float(self.total_probability),
            'outputs': [str(q) for q in self.outputs],
            'pruned': [{str(q): b for q, b in p.items()} for p in self.branches.pruned],
            'branches': [b.to_dict() for b in self.branches],
        }

    def output_vectors(self):
        """Per branch, the joint state of the surviving outputs, None if other qubits remain."""
        vectors = []
        for branch in self.branches:
            quantum = branch.final.quantum
            order = [q for q in self.outputs if q in quantum]
            if len(order) == len(quantum):
                vectors.append(branch.vector(order))
            else:
                vectors.append(None)
        return vectors


def _pattern_inputs(p, given):
    unknown = [name for name in given if name not in {str(q) for q in p.inputs}]
    if unknown:
        raise exceptions.UnknownQubit(f"{unknown} are not inputs of pattern {p.name}")
    missing = [str(q) for q in p.inputs if str(q) not in given]
    if missing:
        raise exceptions.UnknownQubit(f"Input qubits {missing} of pattern {p.name} are "
                                      f"unbound; use --input NAME=STATE")
    return [given[str(q)] for q in p.inputs]


def run_pattern(target, p, config):
    patterns.check_pattern(p)
    if p.params:
        raise exceptions.MissingParam(f"Pattern {p.name} has unbound angle parameters "
                                      f"{list(p.params)}")
    vectors = _pattern_inputs(p, config.inputs)
    assembled, branches = patterns.run_pattern(
        p, vectors or None, config.classical_inputs, mode=config.mode, seed=config.seed,
        tol=config.tolerance)
    logger.debug(f"Ran pattern {p.name}: {len(branches)} branches")
    return RunResult(target, 'pattern', config.mode, config.seed, branches,
                     list(assembled.outputs), assembled)


def _network_inputs(compiled, given):
    inputs = {}
    for name, amplitudes in given.items():
        try:
            label, qubit = composer.split_qualified(name)
        except exceptions.DQVMException:
            raise exceptions.RunConfigError(f"Network input '{name}' must be AGENT.QUBIT")
        inputs[compiled.ref(label, qubit)] = amplitudes
    return inputs


def run_network(target, defn, config):
    patterns.check_pattern(defn.resource)
    compiled = network.compile_network(defn)
    state = network.init_network(compiled, _network_inputs(compiled, config.inputs),
                                 config.classical_inputs, tol=config.tolerance)
    branches = network.run_network(state, mode=config.mode, seed=config.seed,
                                   order=config.order, channel_policy=config.channel_policy)
    logger.debug(f"Ran network {defn.name}: {len(branches)} branches")
    return RunResult(target, 'network', config.mode, config.seed, branches,
                     list(compiled.ownership), compiled)


def run(target, value, config):
    """Run a pattern, a composition or a network definition."""
    if isinstance(value, composer.CompositionExpr):
        value = composer.compile_composition(value)
    if isinstance(value, patterns.Pattern):
        return run_pattern(target, value, config)
    if isinstance(value, network.NetworkDef):
        return run_network(target, value, config)
    raise exceptions.ShapeError(f"'{target}' cannot be run on its own; use it in a network")
