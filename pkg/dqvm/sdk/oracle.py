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
"""Dense reference simulator.

One monolithic state vector over every qubit, hard-coded gate matrices and
projectors. Measured qubits stay in the vector until the end of a branch and
nothing is renormalized, so the squared norm of a branch is its probability.
This module does not use the tangle code and is what the tests compare against.
"""
from dataclasses import dataclass
import math
import typing

import numpy as np

from dqvm.sdk import commands as cmds

_S = 1 / math.sqrt(2)

I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _S
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)

KETS = {
    '0': np.array([1, 0], dtype=complex),
    '1': np.array([0, 1], dtype=complex),
    '+': np.array([1, 1], dtype=complex) * _S,
    '-': np.array([1, -1], dtype=complex) * _S,
}


def j_matrix(alpha):
    phase = np.exp(1j * alpha)
    return np.array([[1, phase], [1, -phase]], dtype=complex) * _S


def kron(*factors):
    result = np.ones(1, dtype=complex)
    for f in factors:
        result = np.kron(result, f)
    return result


def random_state(rng, n_qubits=1):
    v = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return v / np.linalg.norm(v)


def ghz(n):
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = v[-1] = _S
    return v


def ghz_diagonal(n):
    hn = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        hn = np.kron(hn, H)
    return hn @ ghz(n)


def ghz_basis_state(outcomes):
    """GHZ basis vector selected by the outcome string of a GHZ measurement.

    The first outcome fixes the relative sign; the others fix the bit pattern
    as running parities.
    """
    n = len(outcomes)
    bits = [0]
    for m in outcomes[1:]:
        bits.append(bits[-1] ^ m)
    index = int(''.join(str(b) for b in bits), 2)
    v = np.zeros(2 ** n, dtype=complex)
    v[index] = _S
    v[(2 ** n - 1) ^ index] = _S * (-1) ** outcomes[0]
    return v


def _apply_1q(psi, matrix, axis):
    psi = np.tensordot(matrix, psi, axes=([1], [axis]))
    return np.moveaxis(psi, 0, axis)


def _apply_2q(psi, matrix, a, b):
    psi = np.tensordot(matrix.reshape(2, 2, 2, 2), psi, axes=([2, 3], [a, b]))
    return np.moveaxis(psi, [0, 1], [a, b])


def _basis_vector(angle, outcome):
    return np.array([1, (-1) ** outcome * np.exp(1j * angle)], dtype=complex) * _S


def _signal_value(signal, outcomes, bits):
    if signal is None:
        return 0
    if isinstance(signal, cmds.Const):
        return signal.bit
    if isinstance(signal, cmds.Outcome):
        return outcomes[signal.qubit]
    if isinstance(signal, cmds.Input):
        return bits[signal.name]
    return sum(_signal_value(t, outcomes, bits) for t in signal.terms) % 2


@dataclass
class DenseBranch:
    outcomes: typing.Dict
    probability: float
    qubits: typing.List
    vector: np.ndarray


def run_dense(commands, inputs, input_bits=None, output_order=None, prune=1e-12):
    """Enumerate every outcome assignment of a concrete local command list.

    inputs maps a qubit, or a tuple of qubits for a joint state, to amplitudes.
    Qubits that are not inputs start in |+>.
    """
    input_bits = input_bits or {}
    qubits = []
    vector = np.ones(1, dtype=complex)
    for key, amplitudes in inputs.items():
        names = key if isinstance(key, tuple) else (key, )
        qubits.extend(names)
        vector = np.kron(vector, np.asarray(amplitudes, dtype=complex))
    for command in commands:
        for q in command.qubits:
            if q not in qubits:
                qubits.append(q)
                vector = np.kron(vector, KETS['+'])
    shape = (2, ) * len(qubits)
    branches = []

    def finish(psi, outcomes, bras):
        remaining = list(qubits)
        for q, bra in bras.items():
            axis = remaining.index(q)
            psi = np.tensordot(np.conj(bra), psi, axes=([0], [axis]))
            remaining.pop(axis)
        psi = np.asarray(psi).reshape(-1)
        probability = float(np.vdot(psi, psi).real)
        psi = psi / math.sqrt(probability)
        if output_order is not None:
            order = list(output_order)
            psi = np.transpose(psi.reshape((2, ) * len(remaining)),
                               [remaining.index(q) for q in order]).reshape(-1)
            remaining = order
        branches.append(DenseBranch(dict(outcomes), probability, remaining, psi))

    def walk(index, psi, outcomes, bras):
        while index < len(commands):
            c = commands[index]
            index += 1
            if isinstance(c, cmds.Entangle):
                psi = _apply_2q(psi, CZ, qubits.index(c.q1), qubits.index(c.q2))
            elif isinstance(c, (cmds.CorrectX, cmds.CorrectZ)):
                if _signal_value(c.signal, outcomes, input_bits):
                    gate = X if isinstance(c, cmds.CorrectX) else Z
                    psi = _apply_1q(psi, gate, qubits.index(c.qubit))
            elif isinstance(c, cmds.Measure):
                s = _signal_value(c.s, outcomes, input_bits)
                t = _signal_value(c.t, outcomes, input_bits)
                angle = (-1) ** s * c.angle.value + t * math.pi
                axis = qubits.index(c.qubit)
                weight = np.vdot(psi, psi).real
                for outcome in (0, 1):
                    ket = _basis_vector(angle, outcome)
                    projected = _apply_1q(psi, np.outer(ket, np.conj(ket)), axis)
                    if np.vdot(projected, projected).real < prune * weight:
                        continue
                    walk(index, projected, {**outcomes, c.qubit: outcome},
                         {**bras, c.qubit: ket})
                return
            else:
                raise ValueError(f"Dense oracle cannot run {c}")
        finish(psi, outcomes, bras)

    walk(0, vector.reshape(shape), {}, {})
    return branches
