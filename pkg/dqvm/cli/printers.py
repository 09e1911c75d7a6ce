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
import math

import networkx as nx
import yaml

from dqvm import runner
from dqvm.sdk import composer
from dqvm.sdk import state as st


def find_dict_composite_key_value(item, composite_key):
    def _recursive_find(d, keys):
        value = d.get(keys[0])
        if len(keys) == 1:
            return value
        return _recursive_find(value or {}, keys[1:])

    return _recursive_find(item, composite_key.split('.'))


class Field:
    def __init__(self, name, ref):
        self.name = name
        self.ref = ref

    def get_value(self, item):
        return find_dict_composite_key_value(item, self.ref)

    def print_details(self, item, field_length):
        name = self.name.upper().ljust(field_length)
        value = self.get_value(item)

        if isinstance(value, list):
            if value:
                print(name, end='')
                padding = ' ' * field_length
                for i, v in enumerate(value):
                    if i == 0:
                        print(f'- {v}')
                    else:
                        print(f'{padding}- {v}')
            else:
                print(f'{name}None')
        else:
            print(f'{name}{value}')


class ProbabilityField(Field):
    def get_value(self, item):
        return f'{super().get_value(item):.9f}'


class ListField(Field):
    def get_value(self, item):
        value = super().get_value(item)
        return ', '.join(str(v) for v in value) if value else '-'


class BasePrinter:
    @staticmethod
    def _get_columns(items, fields):
        columns = []
        for field in fields:
            values = [str(field.get_value(item)) for item in items]

            column = [field.name.upper()]
            column.extend(values)

            columns.append(column)
        return columns

    @staticmethod
    def _get_column_widths(columns):
        column_widths = []
        for column in columns:
            width = max([len(x) for x in column])
            width = (math.ceil(width / 4) + 1) * 4
            column_widths.append(width)
        return column_widths

    def print_table(self, items, fields):
        columns = self._get_columns(items, fields)
        column_widths = self._get_column_widths(columns)

        for row_index in range(len(items) + 1):
            line = ''.join(column[row_index].ljust(column_widths[col_index])
                           for col_index, column in enumerate(columns))
            print(line.rstrip())

    @staticmethod
    def _get_field_name_length(fields):
        max_length = max([len(field.name) for field in fields])
        length = (math.ceil(max_length / 4) + 1) * 4
        return length

    def print_details(self, item, fields):
        field_length = self._get_field_name_length(fields)
        for field in fields:
            field.print_details(item, field_length)


class JsonPrinter:
    @staticmethod
    def print(data, *args, **kwargs):
        print(json.dumps(_plain(data), indent=2, sort_keys=True))


class YamlPrinter:
    @staticmethod
    def print(data, *args, **kwargs):
        print(yaml.safe_dump(_plain(data), default_flow_style=False), end='')


class SexprPrinter:
    @staticmethod
    def print(data, *args, **kwargs):
        print(data.to_sexpr())


def _plain(data):
    if isinstance(data, list):
        return [_plain(d) for d in data]
    if hasattr(data, 'to_dict'):
        return data.to_dict()
    if hasattr(data, 'to_sexpr'):
        return {'sexpr': str(data.to_sexpr())}
    return data


class BuiltinPrinter(BasePrinter):
    list_fields = (
        Field('Name', 'name'),
        Field('Kind', 'kind'),
        ListField('Params', 'params'),
    )

    def print(self, data, *args, **kwargs):
        self.print_table(data, self.list_fields)


class RunReportPrinter(BasePrinter):
    summary_fields = (
        Field('Target', 'target'),
        Field('Kind', 'kind'),
        Field('Mode', 'mode'),
        Field('Seed', 'seed'),
        Field('Branches', 'count'),
        ProbabilityField('Probability', 'total_probability'),
    )

    def print(self, result, *args, **kwargs):
        summary = result.to_dict()
        summary['count'] = len(result.branches)
        self.print_details(summary, self.summary_fields)
        vectors = result.output_vectors()
        for k, (branch, vector) in enumerate(zip(result.branches, vectors), start=1):
            outcomes = ' '.join(f'{q}={b}' for q, b in branch.outcomes.items()) or '-'
            print()
            print(f'BRANCH {k}'.ljust(12) + f'prob {branch.probability:.9f}')
            print(f'  outcomes  {outcomes}')
            print(f'  state     {st.state_to_sexpr(branch.final.quantum)}')
            if vector is not None and len(vector) > 1:
                qubits = [q for q in result.outputs if q in branch.final.quantum]
                print(f'  output    {st.tangle_to_sexpr(qubits, vector)}')
            ownership = getattr(branch, 'ownership', None)
            if ownership:
                owned = ' '.join(f'{q}:{label}' for q, label in sorted(ownership.items())
                                 if label is not None and q in branch.final.quantum)
                print(f'  owners    {owned}')
        if result.branches.pruned:
            print()
            print(f'{len(result.branches.pruned)} zero-probability branch(es) pruned')


class DiagnosticsPrinter:
    @staticmethod
    def print(diagnostics, *args, **kwargs):
        for d in diagnostics:
            print(d)


def get_run_printer(output_format):
    if output_format == runner.REPORT:
        return RunReportPrinter()

    if output_format == runner.SEXPR:
        return SexprPrinter()

    if output_format == runner.YAML:
        return YamlPrinter()

    return JsonPrinter()


def get_compile_printer(output_format):
    if output_format in (runner.REPORT, runner.SEXPR):
        return SexprPrinter()

    if output_format == runner.YAML:
        return YamlPrinter()

    return JsonPrinter()


def get_builtins_printer(output_format):
    if output_format in (runner.REPORT, runner.SEXPR):
        return BuiltinPrinter()

    if output_format == runner.YAML:
        return YamlPrinter()

    return JsonPrinter()


def graph_to_dict(graph):
    # qubit pairs are tuples; go through json so that yaml gets plain lists
    data = nx.node_link_data(graph, edges='edges')
    return json.loads(json.dumps(data, default=str))


class DotPrinter:
    def __init__(self, name):
        self.name = name

    def print(self, graph, *args, **kwargs):
        print(composer.to_dot(graph, name=self.name))


def get_graph_printer(output_format, name):
    if output_format in (runner.REPORT, runner.SEXPR):
        return DotPrinter(name)

    if output_format == runner.YAML:
        return _GraphDataPrinter(YamlPrinter())

    return _GraphDataPrinter(JsonPrinter())


class _GraphDataPrinter:
    def __init__(self, printer):
        self.printer = printer

    def print(self, graph, *args, **kwargs):
        self.printer.print(graph_to_dict(graph))


def get_diagnostics_printer(output_format):
    if output_format in (runner.REPORT, runner.SEXPR):
        return DiagnosticsPrinter()

    if output_format == runner.YAML:
        return YamlPrinter()

    return JsonPrinter()
