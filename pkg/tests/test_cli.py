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

import json
from unittest import mock

import click
from click.testing import CliRunner
import pytest

import dqvm
from dqvm.cli.interface import cli, click_option_output_format, error_printer
from dqvm.sdk import exceptions

from . import datastore


@pytest.fixture
def workdir(tmp_path):
    d = tmp_path / "dqvm-cli"
    d.mkdir()
    return d


@pytest.fixture
def program(workdir):
    path = workdir / "program.dqvm"
    path.write_text(datastore.PROGRAM, encoding="utf-8")
    return str(path)


@pytest.fixture
def broken(workdir):
    path = workdir / "broken.dqvm"
    path.write_text(datastore.BROKEN + datastore.CYCLIC, encoding="utf-8")
    return str(path)


@pytest.fixture
def stuck(workdir):
    path = workdir / "stuck.dqvm"
    path.write_text(datastore.DEADLOCK, encoding="utf-8")
    return str(path)


def execute(command, exit_code=0, env=None):
    runner = CliRunner()
    result = runner.invoke(cli, command, env=env)
    assert result.exit_code == exit_code, result.output
    return result.output


def client_execute(tmpdir, command, exit_code=0, env=None):
    # force using a new config file and a new profile
    if '--config' not in command:
        cfgpath = tmpdir / 'dqvm.cfg'
        dqvm.sdk.config.Manager(str(cfgpath)).add_profile('default')
        command.extend(['--config', str(cfgpath)])
    return execute(command, exit_code=exit_code, env=env)


def test_command_help():
    output = execute(['--help'])
    assert 'Usage:' in output
    assert 'list-builtins' in output


def test_command_version():
    output = execute(['--version'])
    assert dqvm.__version__ in output


def test_command_config(workdir):
    cfgfile = workdir / "cli.cfg"

    assert cfgfile.exists() is False

    execute([
        'config',
        '--profile', 'sampling',
        '--mode', 'sample',
        '--seed', '4',
        '--config', str(cfgfile),
    ])
    assert cfgfile.exists()

    # check new profile has been created, check also that default profile
    # has been created
    with cfgfile.open() as fp:
        cfg = json.load(fp)
    assert list(cfg.keys()) == ['default', 'sampling']
    assert cfg['sampling']['seed'] == 4

    output = execute(['run', 'builtin:TP', '--input', 'A.1=0', '--profile', 'sampling',
                      '--config', str(cfgfile), '--format', 'json'])
    data = json.loads(output)
    assert data['mode'] == 'sample'
    assert len(data['branches']) == 1


def test_command_unknown_profile(workdir):
    cfgfile = workdir / "cli.cfg"
    execute(['config', '--config', str(cfgfile)])
    output = execute(['list-builtins', '--profile', 'foo', '--config', str(cfgfile)],
                     exit_code=3)
    assert "Profile 'foo' not found" in output


def test_command_validate(workdir, program, broken):
    output = client_execute(workdir, ['validate', program])
    assert output == ''

    output = client_execute(workdir, ['validate', broken], exit_code=1)
    assert 'SWAPPED: command 1: output qubit measured: ?o' in output
    assert 'EARLY: command 1: auxiliary qubit 2 used before entanglement' in output
    assert 'LOOP: Composition graph has a cycle' in output
    assert '6 violation(s)' in output


def test_command_validate_json(workdir, broken):
    output = client_execute(workdir, ['validate', broken, '--format', 'json'], exit_code=1)
    data = json.loads(output[:output.rindex(']') + 1])
    assert data[0] == {'name': 'SWAPPED', 'message': 'command 1: output qubit measured: ?o'}


def test_command_validate_missing_file(workdir):
    output = client_execute(workdir, ['validate', str(workdir / 'nope.dqvm')], exit_code=3)
    assert 'Cannot read' in output


def test_command_run_pattern(workdir):
    output = client_execute(workdir, ['run', 'builtin:H', '--input', '?i=0'])
    assert 'BRANCH 1' in output and 'BRANCH 2' in output
    assert 'prob 0.500000000' in output


def test_command_run_sexpr(workdir):
    output = client_execute(workdir, ['run', 'builtin:I', '--input', '?q=1', '--format',
                                      'sexpr'])
    assert output == ('(run builtin:I (mode enumerate) (seed none) (branches (branch '
                      '(outcomes) (prob 1.000000000) (state (tangle (0) (0 0 1 0))))))\n')


def test_command_run_network(workdir, program):
    output = client_execute(workdir, ['run', program, 'TELEPORT', '--input', 'A.1=+',
                                      '--format', 'json'])
    data = json.loads(output)
    assert data['kind'] == 'network'
    assert len(data['branches']) == 4
    assert all(b['ownership'] == {'3': 'B'} for b in data['branches'])

    output = client_execute(workdir, ['run', program, 'TELEPORT', '--input', 'A.1=+',
                                      '--order', 'B,A', '--channel-policy', 'rendezvous'])
    assert 'owners    3:B' in output


def test_command_run_composition(workdir, program):
    output = client_execute(workdir, ['run', program, 'HH', '--input', '?q1=-',
                                      '--format', 'yaml'])
    assert 'kind: pattern' in output


def test_command_run_sampling(workdir):
    command = ['run', 'builtin:ES:1', '--mode', 'sample', '--seed', '9', '--format', 'json']
    first = json.loads(client_execute(workdir, list(command)))
    second = json.loads(client_execute(workdir, list(command)))
    assert len(first['branches']) == 1
    assert first['branches'] == second['branches']


@pytest.mark.parametrize('params,exit_code,message', [
    (['builtin:H'], 2, 'UnknownQubit'),
    (['builtin:H', '--input', '?i=7'], 3, "Invalid state '7'"),
    (['builtin:H', '--input', '?i=0', '--mode', 'sample'], 3, 'Sample mode needs a seed'),
    (['builtin:H', '--input', '?i=0', '--tol', '0'], 3, 'Tolerance must be positive'),
    (['builtin:NOPE'], 3, "No definition named 'NOPE'"),
    (['builtin:ES:x'], 1, "Invalid size 'x'"),
    (['builtin:TP', '--input', 'A.1=0', '--order', 'A'], 3, 'not a permutation'),
    (['builtin:H', '--bogus'], 3, 'No such option'),
])
def test_command_run_fails(params, exit_code, message, workdir):
    output = client_execute(workdir, ['run'] + params, exit_code=exit_code)
    assert message in output


def test_command_run_deadlock(workdir, stuck):
    output = client_execute(workdir, ['run', stuck, 'STUCK'], exit_code=2)
    assert 'DeadlockError' in output
    assert 'A at (recv' in output


def test_command_run_invalid_pattern(workdir, broken):
    output = client_execute(workdir, ['run', broken, 'SWAPPED', '--input', '?i=0'],
                            exit_code=1)
    assert 'InvalidPattern' in output


@pytest.mark.parametrize('value,exit_code', [('1e-6', 0), ('abc', 3)])
def test_command_tolerance_from_environment(value, exit_code, workdir):
    client_execute(workdir, ['run', 'builtin:H', '--input', '?i=0'], exit_code=exit_code,
                   env={'DQVM_TOL': value})


def test_command_compile(workdir, program, broken):
    output = client_execute(workdir, ['compile', program, 'HAD'])
    assert output == '((?i ?o) (?i) (?o) ((E ?i ?o) (M ?i 0) (X ?o (s ?i))))\n'

    output = client_execute(workdir, ['compile', 'builtin:TP'])
    assert output.startswith('(network TP (resource ')
    assert '(channels (ch0 A B) (ch1 A B))' in output

    output = client_execute(workdir, ['compile', program, 'CNOT', '--format', 'json'])
    data = json.loads(output)
    assert list(data) == ['sexpr']
    assert '(E ' in data['sexpr']

    client_execute(workdir, ['compile', broken, 'SWAPPED'], exit_code=1)
    output = client_execute(workdir, ['compile', broken, 'LOOP'], exit_code=1)
    assert 'CycleDetected' in output


def test_command_graph(workdir, program):
    output = client_execute(workdir, ['graph', 'builtin:CX'])
    assert output.startswith('digraph "builtin:CX" {')
    assert '"cz" -> "h2" [label="2->?i"];' in output

    output = client_execute(workdir, ['graph', program, 'TELEPORT', '--format', 'json'])
    data = json.loads(output)
    assert [n['id'] for n in data['nodes']] == ['A', 'B']
    assert [e['label'] for e in data['edges']] == ['A.c1 -> B.d1', 'A.c2 -> B.d2']


def test_command_list_builtins(workdir):
    output = client_execute(workdir, ['list-builtins'])
    lines = output.splitlines()
    assert lines[0].split() == ['NAME', 'KIND', 'PARAMS']
    assert len(lines) == 13
    assert lines[-1].split() == ['SC-ES', 'network', 'n']

    data = json.loads(client_execute(workdir, ['list-builtins', '--format', 'json']))
    assert data[0] == {'name': 'I', 'kind': 'pattern', 'params': [], 'defaults': []}


def test_command_describe(workdir):
    output = client_execute(workdir, ['describe', 'H'])
    assert 'Hadamard' in output

    output = client_execute(workdir, ['describe', 'NOPE'], exit_code=3)
    assert "No definition named 'NOPE'" in output


@pytest.mark.parametrize('params,output', [
    ([], 'None\n'),
    (['--format', 'json'], 'json\n'),
    (['--format', 'yaml'], 'yaml\n'),
    (['--format', 'sexpr'], 'sexpr\n'),
])
def test_option_output_format(params, output):
    @click.command()
    @click_option_output_format
    def foo(output_format):
        click.echo(str(output_format))

    runner = CliRunner()

    res = runner.invoke(foo, params)
    assert res.output == output


@pytest.mark.parametrize('exception,exit_code', [
    (exceptions.DeadlockError({'A': '(recv c x)'}), 2),
    (exceptions.OwnershipViolation('A', 1, None), 2),
    (exceptions.UnbalancedParens('foo', 3), 1),
    (exceptions.CycleDetected(['a', 'b', 'a']), 1),
    (exceptions.DefinitionNotFound('foo'), 3),
    (exceptions.RunConfigError('foo'), 3),
    (FileNotFoundError(2, 'No such file', 'foo'), 3),
])
def test_error_printer(mocker, exception, exit_code):
    @error_printer
    def foo():
        raise exception

    mock_click_context = mock.MagicMock()
    mock_click_context.params = {'verbose': False}

    mocker.patch('dqvm.cli.interface.click.get_current_context',
                 return_value=mock_click_context)
    with pytest.raises(click.ClickException) as e:
        foo()
    assert e.value.exit_code == exit_code
