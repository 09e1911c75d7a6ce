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

import argparse
import os
import sys

import click

from dqvm.cli.interface import cli

local_dir = os.path.dirname(os.path.abspath(__file__))


def click_get_contexts(name, command, parent=None):
    """Contexts of every leaf command, in declaration order."""
    ctx = click.Context(command, info_name=name, parent=parent)
    if not isinstance(command, click.Group):
        return [ctx]
    contexts = []
    for sub_name, sub_command in command.commands.items():
        contexts += click_get_contexts(sub_name, sub_command, ctx)
    return contexts


def _create_anchor(command_path):
    return "#{}".format(command_path.replace(' ', '-'))


def generate_help(contexts, fh):
    fh.write("# Summary\n\n")
    for ctx in contexts:
        fh.write(f"- [{ctx.command_path}]({_create_anchor(ctx.command_path)})\n")

    fh.write("\n\n")
    fh.write("# Commands\n\n")

    for ctx in contexts:
        fh.write(f"## {ctx.command_path}\n\n")
        fh.write("```bash\n")
        fh.write(ctx.get_help())
        fh.write("\n```\n\n")


def write_help(path):
    contexts = click_get_contexts('dqvm', cli)
    with open(path, 'w') as fh:
        generate_help(contexts, fh)


if __name__ == '__main__':

    def _cb(args):
        write_help(args.output_path)

    doc_dir = os.path.join(local_dir, '../references')
    default_path = os.path.join(doc_dir, 'cli.md')

    parser = argparse.ArgumentParser()
    parser.add_argument('--output-path', type=str, default=default_path, required=False)
    parser.set_defaults(func=_cb)

    args = parser.parse_args(sys.argv[1:])
    args.func(args)
