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

import pytest

from dqvm.sdk import assets, composer, definitions, exceptions, network, oracle, patterns
from dqvm.sdk import state as st
from dqvm.sdk.sexpr import Atom

from .. import datastore


@pytest.fixture
def program():
    return definitions.load_program(datastore.PROGRAM)


def test_program_validates(program):
    assert program.names() == ['HAD', 'JA', 'CNOT', 'HH', 'IH', 'JQ', 'SENDER', 'RECEIVER',
                               'TELEPORT', 'HOLDER', 'SOLO']
    assert program.validate() == []
    assert program.kind('HAD') == assets.PATTERN
    assert program.kind('CNOT') == assets.COMPOSITION
    assert program.kind('SENDER') == assets.AGENT
    assert program.kind('TELEPORT') == assets.NETWORK


def test_parameterized_pattern(program):
    p = program.build('JA')
    assert p.params == ('alpha', )
    bound = program.pattern('JA', [Atom('pi/2')])
    assert bound.params == ()
    with pytest.raises(exceptions.MissingParam):
        program.pattern('JA', [Atom('pi'), Atom('0')])
    with pytest.raises(exceptions.BadAngle):
        program.pattern('JA', [Atom('beta')])


def test_builtin_references(program):
    p = program.pattern('J', [Atom('pi/2')])
    assert p.name == 'J'
    with pytest.raises(exceptions.ShapeError):
        program.pattern('TP')
    with pytest.raises(exceptions.DefinitionNotFound):
        program.pattern('NOPE')


def test_explicit_composition_takes_the_target_first(program):
    p = program.pattern('CNOT')
    assembled, branches = patterns.run_pattern(p, [oracle.KETS['0'], oracle.KETS['1']])
    expected = oracle.kron(oracle.KETS['1'], oracle.KETS['1'])
    for b in branches:
        assert st.state_equal_up_to_phase(b.vector(list(assembled.outputs)), expected)


def test_shortcut_compositions(program, rng):
    vector = oracle.random_state(rng)
    assembled, branches = patterns.run_pattern(program.pattern('HH'), vector)
    for b in branches:
        assert st.state_equal_up_to_phase(b.vector(list(assembled.outputs)), vector)

    p = program.pattern('IH')
    assert len(p.inputs) == 2

    p = program.pattern('JQ')
    assembled, branches = patterns.run_pattern(p, vector)
    expected = oracle.j_matrix(math.pi / 2) @ vector
    for b in branches:
        assert st.state_equal_up_to_phase(b.vector(list(assembled.outputs)), expected)


def test_teleportation_network(program, rng):
    defn = program.network('TELEPORT')
    assert defn.resource.outputs == (2, 3)
    vector = oracle.random_state(rng)
    compiled, branches = network.run(defn, {1: vector})
    assert len(branches) == 4
    for b in branches:
        assert st.state_equal_up_to_phase(b.vector([3]), vector)


def test_agent_calling_a_pattern(program):
    agent = program.agent('HOLDER')
    assert [str(c.to_sexpr()) for c in agent.commands] == [
        '(E ?q ?out)', '(M ?q 0)', '(X ?out (s ?q))']

    compiled = network.compile_network(program.network('SOLO'))
    out = compiled.ref('A', '?out')
    compiled, branches = network.run(compiled, {compiled.ref('A', '?q'): oracle.KETS['0']})
    assert len(branches) == 2
    for b in branches:
        assert st.state_equal_up_to_phase(b.vector([out]), oracle.KETS['+'])


def test_wrong_kind_lookups(program):
    with pytest.raises(exceptions.ShapeError):
        program.agent('HAD')
    with pytest.raises(exceptions.ShapeError):
        program.network('SENDER')
    with pytest.raises(exceptions.DefinitionNotFound):
        program.build('NOPE')


def test_broken_patterns_are_reported():
    program = definitions.load_program(datastore.BROKEN)
    assert [str(d) for d in program.validate()] == [
        'SWAPPED: command 1: output qubit measured: ?o',
        'SWAPPED: command 2: signal from unmeasured qubit ?i',
        'SWAPPED: command 2: qubit ?o used after measurement',
        'SWAPPED: non-output qubit never measured: ?i',
        'EARLY: command 1: auxiliary qubit 2 used before entanglement',
    ]


def test_cyclic_composition():
    program = definitions.load_program(datastore.CYCLIC)
    with pytest.raises(exceptions.CycleDetected) as e:
        composer.compile_composition(program.build('LOOP'))
    assert set(e.value.cycle) == {'a', 'b'}
    diagnostics = program.validate()
    assert len(diagnostics) == 1
    assert diagnostics[0].name == 'LOOP'
    assert 'cycle' in diagnostics[0].message


def test_self_reference():
    program = definitions.load_program(datastore.SELF_REFERENCE)
    with pytest.raises(exceptions.CycleDetected) as e:
        program.build('SELF')
    assert e.value.cycle == ['SELF', 'SELF']


def test_unknown_reference():
    program = definitions.load_program(datastore.UNKNOWN_REFERENCE)
    assert [str(d) for d in program.validate()] == ["MISSING: No definition named 'NOPE'"]
    assert program.validate()[0].to_dict() == {'name': 'MISSING',
                                               'message': "No definition named 'NOPE'"}


def test_load_errors():
    with pytest.raises(exceptions.DuplicateDefinition):
        definitions.load_program(datastore.DUPLICATE)
    with pytest.raises(exceptions.UnbalancedParens):
        definitions.load_program(datastore.UNBALANCED)


@pytest.mark.parametrize('text', [
    '(defthing X)',
    '(defpattern)',
    'atom',
    '(defpattern P () (?q) (?q) (?q))',
    '(defcompose C (loop H))',
    '(defcompose C (seq))',
    '(defcompose C (compose (use H h1)))',
    '(defnetwork N (wire))',
    '(defnetwork N (config (qubits (2 A.1))))',
    '(defnetwork N (agent A))',
])
def test_malformed_definitions(text):
    with pytest.raises(exceptions.DQVMException):
        program = definitions.load_program(text)
        for name in program.names():
            program.build(name)


def test_load_file(tmpdir):
    path = tmpdir / 'program.dqvm'
    path.write_text(datastore.PROGRAM, encoding='utf-8')
    program = definitions.load_file(str(path))
    assert program.source == str(path)
    assert 'TELEPORT' in program
