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
"""Composition of patterns.

A composition is a DAG of pattern instances (nodes) linked by directed qubit
pairs, from an output of one node to an input of another. Compiling it
renames every instance so that paired names coincide, then appends the
command sequences in topological order.
"""
from dataclasses import dataclass, field
import logging
import typing

import networkx as nx

from dqvm.sdk import commands as cmds
from dqvm.sdk import exceptions
from dqvm.sdk import patterns
from dqvm.sdk import utils
from dqvm.sdk.sexpr import Atom, ListExpr, build

logger = logging.getLogger(__name__)


def qualify(label, name):
    """Instance-unique variable for a node's qubit name: ``?n1.o`` for ``n1``/``?o``."""
    text = name[1:] if cmds.is_variable(name) else str(name)
    return f"?{label}.{text}"


def split_qualified(text):
    """``n1.?o`` -> (``n1``, ``?o``); concrete names come back as integers."""
    label, sep, name = text.partition('.')
    if not sep or not label or not name:
        raise exceptions.InvalidLink(f"Qubit name '{text}' is not node-qualified")
    return label, cmds.parse_qubit_name(Atom(name))


@dataclass(frozen=True)
class Node:
    label: str
    pattern: patterns.Pattern

    def instance(self):
        """The node's pattern with every name qualified by the node label."""
        return self.pattern.rename(lambda q: qualify(self.label, q))


@dataclass
class CompositionExpr:
    nodes: typing.List[Node] = field(default_factory=list)
    # (from-label, from-name, to-label, to-name)
    pairs: typing.List[typing.Tuple] = field(default_factory=list)
    name: typing.Optional[str] = None

    def add(self, label, pattern):
        if any(n.label == label for n in self.nodes):
            raise exceptions.InvalidLink(f"Node label '{label}' is used twice")
        self.nodes.append(Node(label, pattern))
        return self

    def link(self, source, target):
        """Pair ``n1.?o`` with ``n2.?i``; labels and names may also be given as tuples."""
        if isinstance(source, str):
            source = split_qualified(source)
        if isinstance(target, str):
            target = split_qualified(target)
        self.pairs.append(tuple(source) + tuple(target))
        return self

    def node(self, label):
        for n in self.nodes:
            if n.label == label:
                return n
        raise exceptions.InvalidLink(f"Unknown node '{label}'")

    def qualified_pairs(self):
        return [(qualify(a, x), qualify(b, y)) for a, x, b, y in self.pairs]

    def to_sexpr(self):
        items = [Atom('compose')]
        for n in self.nodes:
            items.append(build(['use', n.pattern.name or 'anonymous', 'as', n.label]))
        if self.pairs:
            items.append(ListExpr([Atom('link')] + [
                build([f"{a}.{x}", f"{b}.{y}"]) for a, x, b, y in self.pairs
            ]))
        return ListExpr(items)


def check_links(expr):
    used_inputs, used_outputs = set(), set()
    for a, x, b, y in expr.pairs:
        source, target = expr.node(a), expr.node(b)
        if x not in source.pattern.outputs:
            raise exceptions.InvalidLink(f"{a}.{x} is not an output of node {a}")
        if y not in target.pattern.inputs:
            raise exceptions.InvalidLink(f"{b}.{y} is not an input of node {b}")
        if (a, x) in used_outputs:
            raise exceptions.InvalidLink(f"Output {a}.{x} feeds two pairs")
        if (b, y) in used_inputs:
            raise exceptions.InvalidLink(f"Input {b}.{y} receives two pairs")
        used_outputs.add((a, x))
        used_inputs.add((b, y))


def composition_graph(expr):
    graph = nx.DiGraph()
    for index, n in enumerate(expr.nodes):
        graph.add_node(n.label, index=index, pattern=n.pattern.name,
                       inputs=list(n.pattern.inputs), outputs=list(n.pattern.outputs))
    for a, x, b, y in expr.pairs:
        expr.node(a), expr.node(b)
        if graph.has_edge(a, b):
            graph.edges[a, b]['pairs'].append((x, y))
        else:
            graph.add_edge(a, b, pairs=[(x, y)])
    return graph


def toposort(expr):
    """Nodes in topological order, ties broken by declaration order."""
    graph = composition_graph(expr)
    try:
        order = list(nx.lexicographical_topological_sort(
            graph, key=lambda label: graph.nodes[label]['index']))
    except nx.NetworkXUnfeasible:
        cycle = [u for u, _ in nx.find_cycle(graph)]
        raise exceptions.CycleDetected(cycle + cycle[:1])
    logger.debug(f"Composition order: {order}")
    return [expr.node(label) for label in order]


class BindingSet:
    """Map from instance-qualified names to canonical names."""

    def __init__(self):
        self._canonical = {}

    def __contains__(self, name):
        return name in self._canonical

    def __getitem__(self, name):
        return self._canonical[name]

    def __len__(self):
        return len(self._canonical)

    def items(self):
        return self._canonical.items()

    def bind(self, name, canonical):
        self._canonical[name] = canonical

    def groups(self):
        groups = {}
        for name, canonical in self._canonical.items():
            groups.setdefault(canonical, []).append(name)
        return groups


def bind_pairs(pairs, bindings, fresh):
    for left, right in pairs:
        if left in bindings and right in bindings:
            if bindings[left] != bindings[right]:
                raise exceptions.ConflictingBinding(
                    f"{left} and {right} are bound to {bindings[left]} and {bindings[right]}")
        elif left in bindings:
            bindings.bind(right, bindings[left])
        elif right in bindings:
            bindings.bind(left, bindings[right])
        else:
            canonical = fresh()
            bindings.bind(left, canonical)
            bindings.bind(right, canonical)
    return bindings


def compute_bindings(expr, fresh=None, order=None):
    """Bind paired names to shared canonical names, everything else to its own."""
    fresh = fresh or utils.FreshNames()
    order = order or toposort(expr)
    position = {n.label: i for i, n in enumerate(order)}
    indexed = sorted(enumerate(expr.pairs),
                     key=lambda item: (position[item[1][0]], position[item[1][2]], item[0]))
    pairs = [(qualify(a, x), qualify(b, y)) for _, (a, x, b, y) in indexed]

    bindings = bind_pairs(pairs, BindingSet(), fresh)
    for n in order:
        for name in n.instance().names:
            if name not in bindings:
                bindings.bind(name, fresh())
    return bindings


def merge_patterns(p1, p2, name=None):
    return patterns.Pattern(
        space=utils.ordered_union(p1.space, p2.space),
        inputs=utils.ordered_union(p1.inputs,
                                   utils.ordered_difference(p2.inputs, p1.outputs)),
        outputs=utils.ordered_union(utils.ordered_difference(p1.outputs, p2.inputs),
                                    p2.outputs),
        commands=list(p1.commands) + list(p2.commands),
        params=utils.ordered_union(p1.params, p2.params),
        name=name,
    )


def _check_params(order):
    """An unbound angle parameter may be left open in one node only."""
    owner = {}
    for n in order:
        for param in n.pattern.params:
            if param in owner:
                raise exceptions.NameCollision(
                    f"Angle parameter '{param}' is unbound in nodes {owner[param]} and "
                    f"{n.label}; bind it in each node")
            owner[param] = n.label


def compile_composition(expr, fresh=None, name=None):
    check_links(expr)
    order = toposort(expr)
    _check_params(order)
    bindings = compute_bindings(expr, fresh, order)
    merged = None
    for n in order:
        renamed = n.instance().rename(lambda q: bindings[q])
        merged = renamed if merged is None else merge_patterns(merged, renamed)
    if merged is None:
        merged = patterns.Pattern((), (), (), ())
    merged = patterns.Pattern(merged.space, merged.inputs, merged.outputs, merged.commands,
                              merged.params, name or expr.name)
    return patterns.check_pattern(merged)


def seq_compose(p1, p2, name=None):
    """p2 after p1, pairing outputs of p1 with inputs of p2 one by one."""
    if len(p1.outputs) != len(p2.inputs):
        raise exceptions.ArityMismatch(
            f"Cannot compose {len(p1.outputs)} outputs with {len(p2.inputs)} inputs")
    expr = CompositionExpr().add('a', p1).add('b', p2)
    for o, i in zip(p1.outputs, p2.inputs):
        expr.link(('a', o), ('b', i))
    return compile_composition(expr, name=name)


def par_compose(p1, p2, name=None):
    expr = CompositionExpr().add('a', p1).add('b', p2)
    return compile_composition(expr, name=name)


def seq_all(pattern_list, name=None):
    result = pattern_list[0]
    for p in pattern_list[1:]:
        result = seq_compose(result, p)
    return patterns.Pattern(result.space, result.inputs, result.outputs, result.commands,
                            result.params, name)


def par_all(pattern_list, name=None):
    result = pattern_list[0]
    for p in pattern_list[1:]:
        result = par_compose(result, p)
    return patterns.Pattern(result.space, result.inputs, result.outputs, result.commands,
                            result.params, name)


def _dot_id(text):
    return '"' + str(text).replace('"', '\\"') + '"'


def to_dot(graph, name='composition'):
    """Plain-text DOT description of a composition or network graph."""
    lines = [f"digraph {_dot_id(name)} {{"]
    for label, data in graph.nodes(data=True):
        text = data.get('label') or (
            f"{label}: {data.get('pattern') or ''} in={data.get('inputs', [])} "
            f"out={data.get('outputs', [])}")
        lines.append(f"  {_dot_id(label)} [label={_dot_id(text)}];")
    for u, v, data in graph.edges(data=True):
        text = data.get('label') or ', '.join(f"{x}->{y}" for x, y in data.get('pairs', []))
        lines.append(f"  {_dot_id(u)} -> {_dot_id(v)} [label={_dot_id(text)}];")
    lines.append("}")
    return '\n'.join(lines)
