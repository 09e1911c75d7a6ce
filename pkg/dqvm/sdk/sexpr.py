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
"""S-expression values, reader and canonical printer.

Programs are written as parenthesized token streams; ``;`` starts a comment
that runs to the end of the line.
"""
from dataclasses import dataclass
import typing

from dqvm.sdk import exceptions

_DELIMITERS = '();'


@dataclass(frozen=True)
class Atom:
    text: str

    def __post_init__(self):
        if not self.text or any(c.isspace() or c in _DELIMITERS for c in self.text):
            raise ValueError(f"Invalid atom text {self.text!r}")

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class ListExpr:
    items: typing.Tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'items', tuple(self.items))

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, index):
        return self.items[index]

    def __str__(self):
        return print_sexpr(self)


def _byte_offset(text, index):
    return len(text[:index].encode('utf-8'))


def _skip_whitespace(text, i):
    while i < len(text):
        if text[i] == ';':
            while i < len(text) and text[i] != '\n':
                i += 1
            continue
        if not text[i].isspace():
            return i
        i += 1
    return i


def _read_token(text, i):
    start = i
    while i < len(text) and not text[i].isspace() and text[i] not in _DELIMITERS:
        i += 1
    return Atom(text[start:i]), i


def _read(text, i):
    """Read one expression starting at a non-blank position."""
    if text[i] == ')':
        raise exceptions.UnbalancedParens("Unexpected ')'", _byte_offset(text, i))
    if text[i] != '(':
        return _read_token(text, i)

    # (start offset, items) for every open list
    stack = [(i, [])]
    i += 1
    while stack:
        i = _skip_whitespace(text, i)
        if i == len(text):
            raise exceptions.UnbalancedParens(
                "List not closed", _byte_offset(text, stack[-1][0]))
        if text[i] == '(':
            stack.append((i, []))
            i += 1
        elif text[i] == ')':
            _, items = stack.pop()
            value = ListExpr(items)
            i += 1
            if not stack:
                return value, i
            stack[-1][1].append(value)
        else:
            atom, i = _read_token(text, i)
            stack[-1][1].append(atom)


def parse_all(text):
    """Parse every top-level expression of a program text."""
    values = []
    i = _skip_whitespace(text, 0)
    while i < len(text):
        value, i = _read(text, i)
        values.append(value)
        i = _skip_whitespace(text, i)
    return values


def parse_sexpr(text):
    """Parse exactly one expression; blanks and comments around it are ignored."""
    i = _skip_whitespace(text, 0)
    if i == len(text):
        raise exceptions.EmptyInput("Nothing to read", _byte_offset(text, i))
    value, i = _read(text, i)
    i = _skip_whitespace(text, i)
    if i != len(text):
        if text[i] == ')':
            raise exceptions.UnbalancedParens("Unexpected ')'", _byte_offset(text, i))
        raise exceptions.TrailingInput("Unexpected input after expression",
                                       _byte_offset(text, i))
    return value


def print_sexpr(expr):
    if isinstance(expr, Atom):
        return expr.text
    return '(' + ' '.join(print_sexpr(item) for item in expr.items) + ')'


def build(value):
    """Build an expression from nested python lists, tuples, strings and numbers."""
    if isinstance(value, (Atom, ListExpr)):
        return value
    if isinstance(value, (list, tuple)):
        return ListExpr([build(v) for v in value])
    return Atom(str(value))


def is_atom(expr, text=None):
    if not isinstance(expr, Atom):
        return False
    return text is None or expr.text.lower() == text.lower()
