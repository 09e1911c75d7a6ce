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

import pytest
import yaml

from dqvm import runner
from dqvm.cli import printers
from dqvm.sdk import composer, library, patterns
from dqvm.sdk.sexpr import parse_sexpr


@pytest.mark.parametrize('obj,path,res', [
    ({}, 'a', None),
    ({}, 'a.b', None),
    ({'a': None}, 'a.b', None),
    ({'a': 'a'}, 'a', 'a'),
    ({'a': {'b': 'b'}}, 'a.b', 'b'),
])
def test_find_dict_composite_key_value(obj, path, res):
    assert printers.find_dict_composite_key_value(obj, path) == res


def test_find_dict_composite_key_value_fails():
    with pytest.raises(AttributeError):
        printers.find_dict_composite_key_value({'a': 'b'}, 'a.b')


@pytest.mark.parametrize('output_format,printer_cls', [
    ('report', printers.RunReportPrinter),
    ('sexpr', printers.SexprPrinter),
    ('json', printers.JsonPrinter),
    ('yaml', printers.YamlPrinter),
    ('foo', printers.JsonPrinter),
])
def test_get_run_printer(output_format, printer_cls):
    assert isinstance(printers.get_run_printer(output_format), printer_cls)


@pytest.mark.parametrize('output_format,printer_cls', [
    ('report', printers.BuiltinPrinter),
    ('sexpr', printers.BuiltinPrinter),
    ('json', printers.JsonPrinter),
    ('yaml', printers.YamlPrinter),
])
def test_get_builtins_printer(output_format, printer_cls):
    assert isinstance(printers.get_builtins_printer(output_format), printer_cls)


@pytest.mark.parametrize('output_format,printer_cls', [
    ('report', printers.DotPrinter),
    ('json', printers._GraphDataPrinter),
])
def test_get_graph_printer(output_format, printer_cls):
    assert isinstance(printers.get_graph_printer(output_format, 'G'), printer_cls)


def _hadamard_run():
    config = runner.RunConfig(inputs={'?i': (1, 0)})
    return runner.run('H', library.hadamard_pattern(), config)


def test_run_report(capsys):
    printers.RunReportPrinter().print(_hadamard_run())
    output = capsys.readouterr().out
    assert 'TARGET' in output and 'H' in output
    assert 'PROBABILITY' in output and '1.000000000' in output
    assert 'BRANCH 1' in output and 'BRANCH 2' in output
    assert '  outcomes  0=0' in output
    assert 'pruned' not in output


def test_run_json_and_yaml(capsys):
    res = _hadamard_run()
    printers.JsonPrinter().print(res)
    data = json.loads(capsys.readouterr().out)
    assert data['kind'] == 'pattern'
    assert [b['outcomes'] for b in data['branches']] == [{'0': 0}, {'0': 1}]

    printers.YamlPrinter().print(res)
    assert yaml.safe_load(capsys.readouterr().out) == data


def test_builtin_table(capsys):
    printers.BuiltinPrinter().print([
        {'name': 'H', 'kind': 'pattern', 'params': []},
        {'name': 'ES', 'kind': 'network', 'params': ['n']},
    ])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ['NAME', 'KIND', 'PARAMS']
    assert lines[1].split() == ['H', 'pattern', '-']
    assert lines[2].split() == ['ES', 'network', 'n']


def test_graph_to_dict():
    data = printers.graph_to_dict(composer.composition_graph(library.cx_explicit()))
    assert [n['id'] for n in data['nodes']] == ['h1', 'cz', 'h2']
    assert data['nodes'][0]['inputs'] == ['?i']
    edge = data['edges'][0]
    assert (edge['source'], edge['target']) == ('h1', 'cz')
    assert [[str(x) for x in pair] for pair in edge['pairs']] == [['?o', '2']]


def test_graph_yaml(capsys):
    printers.get_graph_printer('yaml', 'CX').print(
        composer.composition_graph(library.cx_explicit()))
    data = yaml.safe_load(capsys.readouterr().out)
    assert data['directed'] is True
    assert [e['target'] for e in data['edges']] == ['cz', 'h2']


def _pruned_run():
    # the second measurement is certain, its other outcome is cut off in both branches
    p = patterns.parse_pattern_def(parse_sexpr('((0 1) (0 1) () ((M 0 0) (M 1 0)))'),
                                   name='TWO')
    config = runner.RunConfig(inputs={'0': runner.parse_state('0'),
                                      '1': runner.parse_state('+')})
    return runner.run('TWO', p, config)


def test_run_json_with_pruned_branches(capsys):
    printers.get_run_printer('json').print(_pruned_run())
    data = json.loads(capsys.readouterr().out)
    assert data['pruned'] == [{'0': 0, '1': 1}, {'0': 1, '1': 1}]
    assert [b['outcomes'] for b in data['branches']] == [{'0': 0, '1': 0}, {'0': 1, '1': 0}]

    printers.get_run_printer('yaml').print(_pruned_run())
    assert yaml.safe_load(capsys.readouterr().out) == data


def test_run_report_pruned_and_outputs(capsys):
    printers.RunReportPrinter().print(_pruned_run())
    output = capsys.readouterr().out
    assert '2 zero-probability branch(es) pruned' in output
    assert '  output' not in output

    printers.RunReportPrinter().print(_hadamard_run())
    output = capsys.readouterr().out
    assert output.count('  output    (tangle (1) (') == 2
