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
"""Quantum state as a product of tangles, and the classical outcome/input maps.

A tangle holds an ordered list of qubit references and an amplitude vector of
length 2**k; the first qubit is the most significant bit of the index.
State values are never mutated: every operation returns a new state.
"""
import math

import numpy as np

from dqvm.sdk import exceptions
from dqvm.sdk.sexpr import Atom, ListExpr, build

DEFAULT_TOL = 1e-9
PRUNE_TOL = 1e-12

PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)

X = 'X'
Z = 'Z'


class Tangle:
    def __init__(self, qubits, amplitudes):
        self.qubits = tuple(qubits)
        if len(set(self.qubits)) != len(self.qubits):
            raise exceptions.DuplicateQubit(f"Duplicate qubit in tangle {self.qubits}")
        amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != 2 ** len(self.qubits):
            raise exceptions.LengthMismatch(
                f"Tangle on {len(self.qubits)} qubits needs {2 ** len(self.qubits)} "
                f"amplitudes, got {amplitudes.size}")
        amplitudes.setflags(write=False)
        self.amplitudes = amplitudes

    def axis(self, qubit):
        return self.qubits.index(qubit)

    def tensor(self):
        """Writable copy of the amplitudes with one axis per qubit."""
        return self.amplitudes.reshape((2, ) * len(self.qubits)).copy()

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self):
        return f"Tangle({self.qubits}, {self.amplitudes})"


class QuantumState:
    def __init__(self, tangles=(), measured=()):
        self.tangles = tuple(tangles)
        self.measured = frozenset(measured)
        self._index = {}
        for i, tangle in enumerate(self.tangles):
            for q in tangle.qubits:
                if q in self._index:
                    raise exceptions.DuplicateQubit(f"Qubit {q} is in two tangles")
                self._index[q] = i

    @property
    def qubits(self):
        return tuple(q for t in self.tangles for q in t.qubits)

    def __contains__(self, qubit):
        return qubit in self._index

    def __len__(self):
        return len(self._index)

    def index_of(self, qubit):
        if qubit in self.measured:
            raise exceptions.AlreadyMeasured(f"Qubit {qubit} has already been measured")
        try:
            return self._index[qubit]
        except KeyError:
            raise exceptions.UnknownQubit(f"Qubit {qubit} is not allocated")

    def tangle_of(self, qubit):
        return self.tangles[self.index_of(qubit)]

    def _replace(self, index, tangle=None, measured=None):
        tangles = list(self.tangles)
        if tangle is None:
            del tangles[index]
        else:
            tangles[index] = tangle
        return QuantumState(tangles, self.measured if measured is None else measured)


class ClassicalState:
    def __init__(self, outcomes=None, inputs=None):
        self.outcomes = dict(outcomes or {})
        self.inputs = dict(inputs or {})

    def with_outcome(self, qubit, bit):
        if qubit in self.outcomes:
            raise exceptions.AlreadyMeasured(f"Outcome of qubit {qubit} is already recorded")
        outcomes = dict(self.outcomes)
        outcomes[qubit] = bit
        return ClassicalState(outcomes, self.inputs)

    def with_input(self, name, bit):
        inputs = dict(self.inputs)
        inputs[name] = bit
        return ClassicalState(self.outcomes, inputs)


def check_invariants(state, tol=DEFAULT_TOL):
    """Structural validator: disjoint tangles, consistent lengths, unit norms."""
    seen = set()
    for tangle in state.tangles:
        if seen & set(tangle.qubits):
            raise exceptions.DuplicateQubit(f"Tangles overlap on {seen & set(tangle.qubits)}")
        seen.update(tangle.qubits)
        if tangle.amplitudes.size != 2 ** len(tangle.qubits):
            raise exceptions.LengthMismatch(f"Inconsistent tangle {tangle.qubits}")
        if abs(tangle.norm() - 1) > tol:
            raise exceptions.NonNormalizedInput(f"Tangle {tangle.qubits} is not normalized")
    if seen & state.measured:
        raise exceptions.AlreadyMeasured(
            f"Measured qubits still allocated: {seen & state.measured}")


def init_tangle(state, qubits, amplitudes, tol=DEFAULT_TOL):
    qubits = tuple(qubits)
    for q in qubits:
        if q in state or q in state.measured:
            raise exceptions.DuplicateQubit(f"Qubit {q} is already allocated")
    tangle = Tangle(qubits, amplitudes)
    if abs(tangle.norm() ** 2 - 1) > tol:
        raise exceptions.NonNormalizedInput(
            f"Input state of {qubits} has squared norm {tangle.norm() ** 2}")
    return QuantumState(state.tangles + (tangle, ), state.measured)


def init_qubit(state, qubit, amplitudes, tol=DEFAULT_TOL):
    return init_tangle(state, (qubit, ), amplitudes, tol=tol)


def merge_tangles(state, q1, q2):
    i, j = state.index_of(q1), state.index_of(q2)
    if i == j:
        return state
    first, second = state.tangles[i], state.tangles[j]
    merged = Tangle(first.qubits + second.qubits,
                    np.kron(first.amplitudes, second.amplitudes))
    tangles = [t for k, t in enumerate(state.tangles) if k != j]
    tangles[tangles.index(first)] = merged
    return QuantumState(tangles, state.measured)


def apply_cz(state, q1, q2):
    if q1 == q2:
        raise exceptions.SameQubit(f"CZ needs two distinct qubits, got {q1} twice")
    state = merge_tangles(state, q1, q2)
    index = state.index_of(q1)
    tangle = state.tangles[index]
    psi = tangle.tensor()
    selector = [slice(None)] * len(tangle.qubits)
    selector[tangle.axis(q1)] = 1
    selector[tangle.axis(q2)] = 1
    psi[tuple(selector)] *= -1
    return state._replace(index, Tangle(tangle.qubits, psi))


def apply_pauli(state, qubit, which):
    index = state.index_of(qubit)
    tangle = state.tangles[index]
    axis = tangle.axis(qubit)
    psi = tangle.tensor()
    if which == X:
        psi = np.flip(psi, axis=axis)
    elif which == Z:
        selector = [slice(None)] * len(tangle.qubits)
        selector[axis] = 1
        psi[tuple(selector)] *= -1
    else:
        raise ValueError(f"Unknown Pauli correction '{which}'")
    return state._replace(index, Tangle(tangle.qubits, psi))


def _project(tangle, qubit, angle):
    """Unnormalized remainders for the outcomes 0 (|+angle>) and 1 (|-angle>)."""
    psi = np.moveaxis(tangle.tensor(), tangle.axis(qubit), 0)
    phase = np.exp(-1j * angle)
    plus = (psi[0] + phase * psi[1]) / math.sqrt(2)
    minus = (psi[0] - phase * psi[1]) / math.sqrt(2)
    return plus.reshape(-1), minus.reshape(-1)


def measurement_probabilities(state, qubit, angle):
    tangle = state.tangle_of(qubit)
    total = tangle.norm() ** 2
    return tuple(float(np.vdot(v, v).real) / total for v in _project(tangle, qubit, angle))


def project_measure(state, qubit, angle, outcome, tol=PRUNE_TOL):
    """Destructively measure qubit; returns the new state and the branch probability."""
    index = state.index_of(qubit)
    tangle = state.tangles[index]
    remainder = _project(tangle, qubit, angle)[outcome]
    probability = float(np.vdot(remainder, remainder).real) / tangle.norm() ** 2
    if probability < tol:
        raise exceptions.ZeroProbabilityBranch(qubit, outcome, probability)

    measured = state.measured | {qubit}
    rest = tuple(q for q in tangle.qubits if q != qubit)
    if not rest:
        return state._replace(index, None, measured), probability
    remainder = remainder / np.linalg.norm(remainder)
    return state._replace(index, Tangle(rest, remainder), measured), probability


def reference_full_state(state, qubit_order):
    qubit_order = list(qubit_order)
    qubits = list(state.qubits)
    if len(set(qubit_order)) != len(qubit_order) or set(qubit_order) != set(qubits):
        raise exceptions.OrderMismatch(
            f"Order {qubit_order} does not match allocated qubits {qubits}")

    vector = np.ones(1, dtype=complex)
    for tangle in state.tangles:
        vector = np.kron(vector, tangle.amplitudes)
    if not qubits:
        return vector
    tensor = vector.reshape((2, ) * len(qubits))
    return np.transpose(tensor, [qubits.index(q) for q in qubit_order]).reshape(-1)


def state_equal_up_to_phase(a, b, tol=DEFAULT_TOL):
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        raise exceptions.LengthMismatch(f"Cannot compare vectors of length {a.size} and {b.size}")
    if a.size == 0:
        return True

    k = int(np.argmax(np.abs(b)))
    if b[k] == 0:
        return bool(np.max(np.abs(a)) <= tol)
    phase = a[k] * np.conj(b[k])
    phase = phase / abs(phase) if phase != 0 else 1
    return bool(np.max(np.abs(a - phase * b)) <= tol)


def _format_number(x):
    return f"{x + 0.0:.12g}"


def tangle_to_sexpr(qubits, amplitudes):
    numbers = []
    for amplitude in amplitudes:
        numbers.extend([_format_number(amplitude.real), _format_number(amplitude.imag)])
    return ListExpr([Atom('tangle'), build(list(qubits)), build(numbers)])


def state_to_sexpr(state):
    return ListExpr([Atom('state')] + [tangle_to_sexpr(t.qubits, t.amplitudes)
                                       for t in state.tangles])
