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
"""Commands, signals and angles of the measurement calculus.

Local commands::

    (E q1 q2)  (M q angle [s] [t])  (X q [signal])  (Z q [signal])

Distributed extensions::

    (send ch signal)  (recv ch name)  (qsend ch q)  (qrecv ch q)

Qubit names are non-negative integers (concrete references) or ``?``-prefixed
variables. Sequences are executed from left to right.
"""
from dataclasses import dataclass
import logging
import math
import re
import typing

from dqvm.sdk import exceptions
from dqvm.sdk.sexpr import Atom, ListExpr, build

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi

_SYMBOLIC_ANGLE = re.compile(r'^(-)?pi(?:/([1-9][0-9]*))?$')
_PARAMETER = re.compile(r'^(-)?([A-Za-z_][A-Za-z0-9_]*)$')
_INTEGER = re.compile(r'^[0-9]+$')


def _lookup(mapping, key):
    if mapping is None:
        return key
    if callable(mapping):
        return mapping(key)
    return mapping.get(key, key)


def is_variable(name):
    return isinstance(name, str) and name.startswith('?')


def parse_qubit_name(expr):
    if not isinstance(expr, Atom):
        raise exceptions.MixedNameKindError("Qubit name must be an atom", expr)
    text = expr.text
    if _INTEGER.match(text):
        return int(text)
    if text.startswith('?') and len(text) > 1:
        return text
    raise exceptions.MixedNameKindError(
        "Qubit name must be an integer or a '?'-prefixed variable", expr)


def _parse_identifier(expr, what):
    if not isinstance(expr, Atom):
        raise exceptions.BadName(f"{what} must be an atom", expr)
    return expr.text


# signals

@dataclass(frozen=True)
class Const:
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"Constant signal must be 0 or 1, got {self.bit}")

    def rename(self, qubits=None, inputs=None):
        return self

    def outcome_qubits(self):
        return ()

    def input_names(self):
        return ()

    def to_sexpr(self):
        return Atom(str(self.bit))


@dataclass(frozen=True)
class Outcome:
    qubit: typing.Union[int, str]

    def rename(self, qubits=None, inputs=None):
        return Outcome(_lookup(qubits, self.qubit))

    def outcome_qubits(self):
        return (self.qubit, )

    def input_names(self):
        return ()

    def to_sexpr(self):
        return build(['s', self.qubit])


@dataclass(frozen=True)
class Input:
    name: str

    def rename(self, qubits=None, inputs=None):
        # inputs may map a name to another name or to a whole signal
        value = _lookup(inputs, self.name)
        return value if isinstance(value, SIGNAL_TYPES) else Input(value)

    def outcome_qubits(self):
        return ()

    def input_names(self):
        return (self.name, )

    def to_sexpr(self):
        return Atom(self.name)


@dataclass(frozen=True)
class Sum:
    terms: typing.Tuple

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(self.terms))
        if not self.terms:
            raise ValueError("Sum signal needs at least one term")

    def rename(self, qubits=None, inputs=None):
        return Sum(t.rename(qubits, inputs) for t in self.terms)

    def outcome_qubits(self):
        return tuple(q for t in self.terms for q in t.outcome_qubits())

    def input_names(self):
        return tuple(n for t in self.terms for n in t.input_names())

    def to_sexpr(self):
        return ListExpr([Atom('+')] + [t.to_sexpr() for t in self.terms])


SIGNAL_TYPES = (Const, Outcome, Input, Sum)

ZERO = Const(0)
ONE = Const(1)


def parse_signal(expr):
    if isinstance(expr, Atom):
        text = expr.text
        if text in ('0', '1'):
            return Const(int(text))
        if _INTEGER.match(text) or text.startswith('?') or text in ('s', '+'):
            raise exceptions.BadSignal("Invalid signal atom", expr)
        return Input(text)

    if len(expr) == 0 or not isinstance(expr[0], Atom):
        raise exceptions.BadSignal("Invalid signal", expr)
    head = expr[0].text.lower()
    if head == 's':
        if len(expr) != 2:
            raise exceptions.BadSignal("Outcome signal takes one qubit", expr)
        return Outcome(parse_qubit_name(expr[1]))
    if head == '+':
        if len(expr) < 2:
            raise exceptions.BadSignal("Sum signal needs at least one term", expr)
        return Sum(parse_signal(t) for t in expr.items[1:])
    raise exceptions.BadSignal("Unknown signal form", expr)


# angles

def normalize_angle(value):
    value = math.fmod(value, TWO_PI)
    if value < 0:
        value += TWO_PI
    if value >= TWO_PI:
        value = 0.0
    return value + 0.0


@dataclass(frozen=True)
class Angle:
    value: float

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value):
            raise ValueError(f"Angle must be finite, got {value}")
        object.__setattr__(self, 'value', normalize_angle(value))

    def to_sexpr(self):
        if self.value == 0:
            return Atom('0')
        if self.value.is_integer():
            return Atom(str(int(self.value)))
        return Atom(repr(self.value))


@dataclass(frozen=True)
class AngleParam:
    """Symbolic angle, optionally negated, bound by instantiate_params."""
    name: str
    negated: bool = False

    def bind(self, value):
        return Angle(-value if self.negated else value)

    def to_sexpr(self):
        return Atom(f"-{self.name}" if self.negated else self.name)


def parse_angle(expr):
    if not isinstance(expr, Atom):
        raise exceptions.BadAngle("Angle must be an atom", expr)
    text = expr.text

    match = _SYMBOLIC_ANGLE.match(text)
    if match:
        sign, divisor = match.groups()
        value = math.pi / int(divisor) if divisor else math.pi
        return Angle(-value if sign else value)

    match = _PARAMETER.match(text)
    if match:
        sign, name = match.groups()
        if name.lower() in ('inf', 'infinity', 'nan'):
            raise exceptions.BadAngle("Angle must be finite", expr)
        return AngleParam(name, negated=bool(sign))

    try:
        value = float(text)
    except ValueError:
        raise exceptions.BadAngle("Invalid angle literal", expr)
    if not math.isfinite(value):
        raise exceptions.BadAngle("Angle must be finite", expr)
    return Angle(value)


# commands

@dataclass(frozen=True)
class Entangle:
    q1: typing.Union[int, str]
    q2: typing.Union[int, str]

    distributed = False

    def __post_init__(self):
        if self.q1 == self.q2:
            raise exceptions.SameQubit(f"Cannot entangle qubit {self.q1} with itself")

    @property
    def qubits(self):
        return (self.q1, self.q2)

    def signals(self):
        return ()

    def rename(self, qubits=None, channels=None, inputs=None):
        return Entangle(_lookup(qubits, self.q1), _lookup(qubits, self.q2))

    def to_sexpr(self):
        return build(['E', self.q1, self.q2])


@dataclass(frozen=True)
class Measure:
    qubit: typing.Union[int, str]
    angle: typing.Union[Angle, AngleParam]
    s: typing.Optional[object] = None
    t: typing.Optional[object] = None

    distributed = False

    def __post_init__(self):
        if self.t is not None and self.s is None:
            object.__setattr__(self, 's', ZERO)

    @property
    def qubits(self):
        return (self.qubit, )

    def signals(self):
        return tuple(x for x in (self.s, self.t) if x is not None)

    def rename(self, qubits=None, channels=None, inputs=None):
        s = self.s.rename(qubits, inputs) if self.s is not None else None
        t = self.t.rename(qubits, inputs) if self.t is not None else None
        return Measure(_lookup(qubits, self.qubit), self.angle, s, t)

    def with_angle(self, angle):
        return Measure(self.qubit, angle, self.s, self.t)

    def to_sexpr(self):
        items = [Atom('M'), build(self.qubit), self.angle.to_sexpr()]
        if self.t is not None:
            items.append(self.s.to_sexpr())
            items.append(self.t.to_sexpr())
        elif self.s is not None:
            items.append(self.s.to_sexpr())
        return ListExpr(items)


class _Correction:
    op = None
    distributed = False

    @property
    def qubits(self):
        return (self.qubit, )

    def signals(self):
        return (self.signal, )

    def rename(self, qubits=None, channels=None, inputs=None):
        return type(self)(_lookup(qubits, self.qubit), self.signal.rename(qubits, inputs))

    def to_sexpr(self):
        items = [Atom(self.op), build(self.qubit)]
        if self.signal != ONE:
            items.append(self.signal.to_sexpr())
        return ListExpr(items)


@dataclass(frozen=True)
class CorrectX(_Correction):
    qubit: typing.Union[int, str]
    signal: object = ONE

    op = 'X'


@dataclass(frozen=True)
class CorrectZ(_Correction):
    qubit: typing.Union[int, str]
    signal: object = ONE

    op = 'Z'


@dataclass(frozen=True)
class Send:
    channel: str
    signal: object

    distributed = True
    qubits = ()

    def signals(self):
        return (self.signal, )

    def rename(self, qubits=None, channels=None, inputs=None):
        return Send(_lookup(channels, self.channel), self.signal.rename(qubits, inputs))

    def to_sexpr(self):
        return ListExpr([Atom('send'), Atom(str(self.channel)), self.signal.to_sexpr()])


@dataclass(frozen=True)
class Recv:
    channel: str
    name: str

    distributed = True
    qubits = ()

    def signals(self):
        return ()

    def rename(self, qubits=None, channels=None, inputs=None):
        return Recv(_lookup(channels, self.channel), _lookup(inputs, self.name))

    def to_sexpr(self):
        return build(['recv', self.channel, self.name])


@dataclass(frozen=True)
class QSend:
    channel: str
    qubit: typing.Union[int, str]

    distributed = True

    @property
    def qubits(self):
        return (self.qubit, )

    def signals(self):
        return ()

    def rename(self, qubits=None, channels=None, inputs=None):
        return QSend(_lookup(channels, self.channel), _lookup(qubits, self.qubit))

    def to_sexpr(self):
        return build(['qsend', self.channel, self.qubit])


@dataclass(frozen=True)
class QRecv:
    channel: str
    name: typing.Union[int, str]

    distributed = True
    qubits = ()

    def signals(self):
        return ()

    def rename(self, qubits=None, channels=None, inputs=None):
        return QRecv(_lookup(channels, self.channel), _lookup(qubits, self.name))

    def to_sexpr(self):
        return build(['qrecv', self.channel, self.name])


_ARITY = {
    'e': (2, 2),
    'm': (2, 4),
    'x': (1, 2),
    'y': (1, 2),
    'z': (1, 2),
    'send': (2, 2),
    'recv': (2, 2),
    'qsend': (2, 2),
    'qrecv': (2, 2),
}

_DISTRIBUTED = ('send', 'recv', 'qsend', 'qrecv')


def parse_command(expr, allow_distributed=False):
    if not isinstance(expr, ListExpr) or len(expr) == 0 or not isinstance(expr[0], Atom):
        raise exceptions.UnknownOperator("Command must be a list starting with an operator",
                                         expr)
    op = expr[0].text.lower()
    if op not in _ARITY:
        raise exceptions.UnknownOperator(f"Unknown operator '{expr[0].text}'", expr)
    if op in _DISTRIBUTED and not allow_distributed:
        raise exceptions.DistributedOpInLocalContext(
            f"'{op}' is only allowed in agent programs", expr)

    args = expr.items[1:]
    low, high = _ARITY[op]
    if not low <= len(args) <= high:
        raise exceptions.ArityError(f"'{op}' takes {low} to {high} arguments", expr)

    if op == 'e':
        q1, q2 = parse_qubit_name(args[0]), parse_qubit_name(args[1])
        if q1 == q2:
            raise exceptions.ArityError("E needs two distinct qubits", expr)
        return Entangle(q1, q2)

    if op == 'm':
        signals = [parse_signal(a) for a in args[2:]]
        signals += [None] * (2 - len(signals))
        return Measure(parse_qubit_name(args[0]), parse_angle(args[1]), *signals)

    if op in ('x', 'y', 'z'):
        qubit = parse_qubit_name(args[0])
        signal = parse_signal(args[1]) if len(args) == 2 else ONE
        if op == 'y':
            logger.warning(f"Y correction on qubit {qubit} is executed as a Z correction")
            op = 'z'
        cls = CorrectX if op == 'x' else CorrectZ
        return cls(qubit, signal)

    channel = _parse_identifier(args[0], "Channel name")
    if op == 'send':
        return Send(channel, parse_signal(args[1]))
    if op == 'recv':
        return Recv(channel, _parse_identifier(args[1], "Input name"))
    if op == 'qsend':
        return QSend(channel, parse_qubit_name(args[1]))
    return QRecv(channel, parse_qubit_name(args[1]))


def parse_command_sequence(expr, allow_distributed=False):
    if not isinstance(expr, ListExpr):
        raise exceptions.ShapeError("Command sequence must be a list", expr)
    return [parse_command(item, allow_distributed) for item in expr]


def commands_to_sexpr(commands):
    return ListExpr([c.to_sexpr() for c in commands])


def rename_commands(commands, qubits=None, channels=None, inputs=None):
    return [c.rename(qubits, channels, inputs) for c in commands]
