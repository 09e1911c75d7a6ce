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

import math

from hypothesis import given, settings
from hypothesis import strategies as hst
import numpy as np
import pytest

from dqvm.sdk import commands as cmds
from dqvm.sdk import exceptions, interpreter, oracle
from dqvm.sdk import state as st

ZERO = oracle.KETS['0']
ONE = oracle.KETS['1']
PLUS = oracle.KETS['+']


def two_qubits(a=ZERO, b=ONE):
    state = st.init_qubit(st.QuantumState(), 'a', a)
    return st.init_qubit(state, 'b', b)


def test_fresh_qubits_are_separate_tangles():
    state = two_qubits()
    assert len(state.tangles) == 2
    assert state.qubits == ('a', 'b')
    assert 'a' in state and 'c' not in state
    st.check_invariants(state)


def test_merge_tangles_is_a_tensor_product():
    state = st.merge_tangles(two_qubits(), 'a', 'b')
    assert len(state.tangles) == 1
    np.testing.assert_allclose(state.tangles[0].amplitudes, [0, 1, 0, 0])
    assert st.merge_tangles(state, 'a', 'b') is state


def test_apply_cz():
    state = st.init_qubit(st.QuantumState(), 1, PLUS)
    state = st.init_qubit(state, 2, PLUS)
    state = st.apply_cz(state, 1, 2)
    np.testing.assert_allclose(state.tangles[0].amplitudes, np.array([1, 1, 1, -1]) / 2)
    with pytest.raises(exceptions.SameQubit):
        st.apply_cz(state, 1, 1)


def test_apply_pauli():
    state = st.merge_tangles(two_qubits(), 'a', 'b')
    flipped = st.apply_pauli(state, 'a', st.X)
    np.testing.assert_allclose(flipped.tangles[0].amplitudes, [0, 0, 0, 1])
    signed = st.apply_pauli(flipped, 'b', st.Z)
    np.testing.assert_allclose(signed.tangles[0].amplitudes, [0, 0, 0, -1])
    # the original value is left untouched
    np.testing.assert_allclose(state.tangles[0].amplitudes, [0, 1, 0, 0])


def test_measurement_removes_the_qubit():
    state = st.apply_cz(two_qubits(PLUS, PLUS), 'a', 'b')
    state, p = st.project_measure(state, 'a', 0.0, 0)
    assert math.isclose(p, 0.5)
    assert state.qubits == ('b', )
    assert 'a' in state.measured
    with pytest.raises(exceptions.AlreadyMeasured):
        state.index_of('a')
    # outcome 0 leaves H|+> = |0> on b
    np.testing.assert_allclose(state.tangles[0].amplitudes, ZERO, atol=1e-12)


def test_measuring_a_lone_qubit_drops_its_tangle():
    state = st.init_qubit(st.QuantumState(), 0, PLUS)
    state, p = st.project_measure(state, 0, 0.0, 0)
    assert math.isclose(p, 1.0)
    assert state.tangles == ()
    assert len(state) == 0


def test_zero_probability_outcome():
    state = st.init_qubit(st.QuantumState(), 0, PLUS)
    assert st.measurement_probabilities(state, 0, 0.0) == pytest.approx((1.0, 0.0))
    with pytest.raises(exceptions.ZeroProbabilityBranch) as e:
        st.project_measure(state, 0, 0.0, 1)
    assert e.value.outcome == 1


def test_measurement_angle_convention():
    # outcome 0 at angle b projects on (<0| + e^{-ib} <1|) / sqrt(2)
    ket = np.array([1, 1j]) / math.sqrt(2)
    state = st.init_qubit(st.QuantumState(), 0, ket)
    p0, p1 = st.measurement_probabilities(state, 0, math.pi / 2)
    assert p0 == pytest.approx(1.0)
    assert p1 == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize('build,exc', [
    (lambda: st.init_qubit(two_qubits(), 'a', ZERO), exceptions.DuplicateQubit),
    (lambda: st.init_qubit(st.QuantumState(), 0, [1, 1]), exceptions.NonNormalizedInput),
    (lambda: st.Tangle((0, 1), [1, 0]), exceptions.LengthMismatch),
    (lambda: st.Tangle((0, 0), [1, 0, 0, 0]), exceptions.DuplicateQubit),
    (lambda: st.apply_pauli(two_qubits(), 'c', st.X), exceptions.UnknownQubit),
    (lambda: st.reference_full_state(two_qubits(), ['a']), exceptions.OrderMismatch),
    (lambda: st.state_equal_up_to_phase([1, 0], [1, 0, 0, 0]), exceptions.LengthMismatch),
])
def test_state_errors(build, exc):
    with pytest.raises(exc):
        build()


def test_reference_full_state_order():
    state = two_qubits()
    np.testing.assert_allclose(st.reference_full_state(state, ['a', 'b']), [0, 1, 0, 0])
    np.testing.assert_allclose(st.reference_full_state(state, ['b', 'a']), [0, 0, 1, 0])
    np.testing.assert_allclose(st.reference_full_state(st.QuantumState(), []), [1])


def test_state_equal_up_to_phase():
    v = np.array([0.6, 0.8j])
    assert st.state_equal_up_to_phase(v * np.exp(0.3j), v)
    assert not st.state_equal_up_to_phase(np.array([0.6, -0.8j]), v)
    assert st.state_equal_up_to_phase([], [])


def test_state_to_sexpr():
    state = st.init_qubit(st.QuantumState(), 0, ZERO)
    assert str(st.state_to_sexpr(state)) == "(state (tangle (0) (1 0 0 0)))"


def test_classical_state_records_outcomes_once():
    classical = st.ClassicalState().with_outcome(1, 0)
    assert classical.outcomes == {1: 0}
    with pytest.raises(exceptions.AlreadyMeasured):
        classical.with_outcome(1, 1)


# the tangle machine agrees with a dense state-vector simulation

def _j_chain(angles):
    commands = []
    for k, alpha in enumerate(angles):
        commands += [
            cmds.Entangle(k, k + 1),
            cmds.Measure(k, cmds.Angle(-alpha)),
            cmds.CorrectX(k + 1, cmds.Outcome(k)),
        ]
    return commands


def _compare(commands, inputs, outputs):
    branches = interpreter.run_sequence(commands, inputs)
    dense = {tuple(sorted(b.outcomes.items())): b
             for b in oracle.run_dense(commands, inputs, output_order=outputs)}
    assert len(branches) == len(dense)
    for branch in branches:
        reference = dense[tuple(sorted(branch.outcomes.items()))]
        assert branch.probability == pytest.approx(reference.probability, abs=1e-9)
        assert st.state_equal_up_to_phase(branch.vector(outputs), reference.vector)
    assert branches.total_probability == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(hst.lists(hst.floats(-10, 10, allow_nan=False), min_size=1, max_size=4),
       hst.integers(0, 2 ** 32 - 1))
def test_j_chain_matches_dense_simulation(angles, seed):
    vector = oracle.random_state(np.random.default_rng(seed))
    commands = _j_chain(angles)
    _compare(commands, {0: vector}, [len(angles)])

    expected = vector
    for alpha in angles:
        expected = oracle.j_matrix(alpha) @ expected
    for branch in interpreter.run_sequence(commands, {0: vector}):
        assert st.state_equal_up_to_phase(branch.vector([len(angles)]), expected)


@settings(max_examples=25, deadline=None)
@given(hst.floats(-10, 10, allow_nan=False), hst.floats(-10, 10, allow_nan=False),
       hst.integers(0, 2 ** 32 - 1))
def test_dependent_measurements_match_dense_simulation(a, b, seed):
    vector = oracle.random_state(np.random.default_rng(seed), 2)
    commands = [
        cmds.Entangle(0, 2),
        cmds.Entangle(1, 2),
        cmds.Entangle(2, 3),
        cmds.Measure(0, cmds.Angle(a)),
        cmds.Measure(1, cmds.Angle(b), cmds.Outcome(0), None),
        cmds.Measure(2, cmds.Angle(0), cmds.Outcome(1), cmds.Outcome(0)),
        cmds.CorrectX(3, cmds.Outcome(2)),
        cmds.CorrectZ(3, cmds.Sum([cmds.Outcome(0), cmds.Outcome(1)])),
    ]
    _compare(commands, {(0, 1): vector}, [3])


def _random_sequence(rng):
    """Inputs, then every auxiliary qubit entangled before anything else touches it."""
    n = int(rng.integers(1, 9))
    k = int(rng.integers(1, n + 1))
    inputs = {}
    if k >= 2 and rng.random() < 0.3:
        inputs[(0, 1)] = oracle.random_state(rng, 2)
    for q in range(len(inputs) * 2, k):
        inputs[q] = oracle.random_state(rng)

    live, measured, commands = list(range(k)), [], []
    for q in range(k, n):
        commands.append(cmds.Entangle(int(rng.choice(live)), q))
        live.append(q)

    def signal():
        if len(measured) >= 2 and rng.random() < 0.3:
            a, b = rng.choice(measured, 2, replace=False)
            return cmds.Sum([cmds.Outcome(int(a)), cmds.Outcome(int(b))])
        return cmds.Outcome(int(rng.choice(measured)))

    for _ in range(int(rng.integers(0, 13))):
        kind = rng.choice(['E', 'M', 'X', 'Z'])
        if kind == 'E' and len(live) >= 2:
            a, b = rng.choice(live, 2, replace=False)
            commands.append(cmds.Entangle(int(a), int(b)))
        elif kind == 'M' and live:
            q = int(rng.choice(live))
            s = signal() if measured and rng.random() < 0.5 else None
            t = signal() if measured and rng.random() < 0.5 else None
            commands.append(cmds.Measure(q, cmds.Angle(rng.uniform(0, 2 * math.pi)), s, t))
            live.remove(q)
            measured.append(q)
        elif kind in ('X', 'Z') and live and measured:
            correction = cmds.CorrectX if kind == 'X' else cmds.CorrectZ
            commands.append(correction(int(rng.choice(live)), signal()))
    return commands, inputs, live


@settings(max_examples=500, deadline=None)
@given(hst.integers(0, 2 ** 32 - 1))
def test_random_sequences_match_dense_simulation(seed):
    commands, inputs, outputs = _random_sequence(np.random.default_rng(seed))
    _compare(commands, inputs, outputs)


@settings(max_examples=50, deadline=None)
@given(hst.lists(hst.tuples(hst.integers(0, 4), hst.integers(0, 4)).filter(lambda e: e[0] != e[1]),
                 min_size=1, max_size=8),
       hst.randoms(use_true_random=False),
       hst.integers(0, 2 ** 32 - 1))
def test_entangle_commands_commute(edges, shuffler, seed):
    rng = np.random.default_rng(seed)
    inputs = {q: oracle.random_state(rng) for q in range(5)}
    commands = [cmds.Entangle(a, b) for a, b in edges]
    reordered = [cmds.Entangle(b, a) for a, b in edges]
    shuffler.shuffle(reordered)
    first, = interpreter.run_sequence(commands, inputs)
    second, = interpreter.run_sequence(reordered, inputs)
    assert st.state_equal_up_to_phase(first.vector(range(5)), second.vector(range(5)))
