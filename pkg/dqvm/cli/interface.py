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

import functools
import logging

import click
import consolemd

from dqvm import __version__, runner
from dqvm.cli import printers
from dqvm.sdk import exceptions, interpreter, network
from dqvm.sdk import config as configuration
from dqvm.sdk.client import Client

VALIDATION_ERROR = 1
RUNTIME_ERROR = 2
USAGE_ERROR = 3


class ValidationFailed(click.ClickException):
    exit_code = VALIDATION_ERROR


class RuntimeFailure(click.ClickException):
    exit_code = RUNTIME_ERROR


class UsageFailure(click.ClickException):
    exit_code = USAGE_ERROR


class DQVMGroup(click.Group):
    """Command group reporting click usage errors with the usage exit code."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = USAGE_ERROR
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = USAGE_ERROR
            raise


def get_client(config_path, profile_name):
    """Initialize dqvm client from config file and profile name."""
    help_command = "dqvm config --profile <name> ..."

    try:
        client = Client(config_path, profile_name)

    except configuration.ProfileNotFoundError:
        raise UsageFailure(
            f"Profile '{profile_name}' not found. Please run '{help_command}'.")

    except configuration.ConfigException as e:
        raise UsageFailure(str(e))

    return client


def split_target(first, second):
    """``[FILE] TARGET`` arguments -> (path, target)."""
    if second is None:
        return None, first
    return first, second


def click_option_profile(f):
    """Add profile option to command."""
    return click.option(
        '--profile',
        default=configuration.DEFAULT_PROFILE_NAME,
        help='Profile name to use.')(f)


def click_option_config(f):
    """Add config option to command."""
    return click.option(
        '--config',
        type=click.Path(dir_okay=False, resolve_path=True),
        default=configuration.DEFAULT_PATH,
        help='Config path (default ~/.dqvm).')(f)


def click_option_output_format(f):
    """Add format option to command."""
    return click.option(
        '--format', 'output_format',
        type=click.Choice(runner.FORMATS),
        help='Output format (default from the profile, report).')(f)


def _set_verbose(ctx, param, value):
    if value:
        logging.basicConfig(level=logging.DEBUG)
    return value


def click_option_verbose(f):
    """Add verbose option to command."""
    return click.option(
        '--verbose',
        is_flag=True,
        is_eager=True,
        callback=_set_verbose,
        help='Enable verbose mode.'
    )(f)


def click_argument_target(f):
    """Add optional FILE and TARGET arguments to command."""
    f = click.argument('second', required=False, metavar='TARGET')(f)
    return click.argument('first', metavar='[FILE]')(f)


def error_printer(fn):
    """Command decorator to pretty print sdk exceptions with their exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        if ctx.params.get('verbose', False):
            # disable pretty print of errors if verbose mode is activated
            return fn(*args, **kwargs)

        try:
            return fn(*args, **kwargs)

        except (exceptions.DefinitionNotFound,
                exceptions.RunConfigError,
                configuration.ConfigException) as e:
            raise UsageFailure(str(e))

        except OSError as e:
            raise UsageFailure(f"Cannot read '{e.filename}': {e.strerror}")

        except (exceptions.StateError, exceptions.ExecutionError) as e:
            raise RuntimeFailure(f"{e.__class__.__name__}: {e}")

        except exceptions.DQVMException as e:
            raise ValidationFailed(f"{e.__class__.__name__}: {e}")

        except ValueError as e:
            raise UsageFailure(str(e))

    return wrapper


def _output_format(client, output_format):
    return output_format or client.settings['format']


@click.group(cls=DQVMGroup)
@click.version_option(__version__)
@click.pass_context
def cli(ctx):
    """Distributed quantum virtual machine.

    Validate, compile and run measurement patterns and networks of agents
    written in s-expression definition files. Builtin protocols are reached
    with the builtin: prefix, e.g. builtin:ES:3.
    """
    pass


@cli.command('config')
@click.option('--config', type=click.Path(dir_okay=False),
              default=configuration.DEFAULT_PATH,
              help='Config path (default ~/.dqvm).')
@click.option('--profile', default=configuration.DEFAULT_PROFILE_NAME,
              help='Profile name to add')
@click.option('--mode', type=click.Choice(interpreter.MODES),
              default=configuration.DEFAULT_MODE)
@click.option('--seed', type=click.INT)
@click.option('--tol', 'tolerance', type=click.FLOAT,
              default=configuration.DEFAULT_TOLERANCE)
@click.option('--format', 'output_format', type=click.Choice(runner.FORMATS),
              default=configuration.DEFAULT_FORMAT)
def add_profile_to_config(config, profile, mode, seed, tolerance, output_format):
    """Add profile to config file."""
    configuration.Manager(config).add_profile(
        profile,
        mode=mode,
        seed=seed,
        tolerance=tolerance,
        format=output_format,
    )


@cli.command()
@click.argument('path', type=click.Path(dir_okay=False), metavar='FILE')
@click_option_output_format
@click_option_config
@click_option_profile
@click_option_verbose
@click.pass_context
@error_printer
def validate(ctx, path, output_format, config, profile, verbose):
    """Validate every definition of a file.

    Prints one diagnostic per violation and exits with 1 when any is found.
    """
    client = get_client(config, profile)
    diagnostics = client.validate(path)
    printer = printers.get_diagnostics_printer(_output_format(client, output_format))
    printer.print(diagnostics)
    if diagnostics:
        raise ValidationFailed(f"{len(diagnostics)} violation(s) in '{path}'")


@cli.command('compile')
@click_argument_target
@click_option_output_format
@click_option_config
@click_option_profile
@click_option_verbose
@click.pass_context
@error_printer
def compile_(ctx, first, second, output_format, config, profile, verbose):
    """Compile a composition or a network.

    \b
    Prints the merged pattern, or the resource and agent sequences of a
    network, in canonical s-expression form.
    """
    path, target = split_target(first, second)
    client = get_client(config, profile)
    res = client.compile(target, path)
    printer = printers.get_compile_printer(_output_format(client, output_format))
    printer.print(res)


@cli.command()
@click_argument_target
@click.option('--mode', type=click.Choice(interpreter.MODES),
              help='Enumerate every branch or sample one (default enumerate).')
@click.option('--seed', type=click.INT, help='Random seed, required in sample mode.')
@click.option('--input', 'inputs', multiple=True, metavar='QUBIT=STATE',
              help='Input state: 0, 1, +, - or "(a b)"; network qubits as AGENT.QUBIT.')
@click.option('--cinput', 'cinputs', multiple=True, metavar='NAME=BIT',
              help='Classical input bit.')
@click.option('--tol', 'tolerance', type=click.FLOAT,
              help=f'Numerical tolerance (default ${configuration.TOLERANCE_ENV} or 1e-9).')
@click.option('--order', help='Comma separated agent schedule of a network.')
@click.option('--channel-policy', type=click.Choice(network.CHANNEL_POLICIES),
              default=network.BUFFERED, show_default=True)
@click_option_output_format
@click_option_config
@click_option_profile
@click_option_verbose
@click.pass_context
@error_printer
def run(ctx, first, second, mode, seed, inputs, cinputs, tolerance, order, channel_policy,
        output_format, config, profile, verbose):
    """Run a pattern, a composition or a network.

    \b
    Examples:
      dqvm run builtin:H --input ?i=0
      dqvm run builtin:TP --input A.1=+
      dqvm run docs/programs/teleport.dqvm TELEPORT --input A.1=1
    """
    path, target = split_target(first, second)
    client = get_client(config, profile)
    settings = client.settings
    output_format = _output_format(client, output_format)
    run_config = runner.RunConfig(
        mode=mode or settings['mode'],
        seed=seed if seed is not None else settings['seed'],
        inputs=runner.parse_inputs(inputs),
        classical_inputs=runner.parse_classical_inputs(cinputs),
        tolerance=tolerance if tolerance is not None else settings['tolerance'],
        format=output_format,
        order=[label.strip() for label in order.split(',')] if order else None,
        channel_policy=channel_policy,
    )
    res = client.run(target, path, run_config)
    printer = printers.get_run_printer(output_format)
    printer.print(res)


@cli.command()
@click_argument_target
@click_option_output_format
@click_option_config
@click_option_profile
@click_option_verbose
@click.pass_context
@error_printer
def graph(ctx, first, second, output_format, config, profile, verbose):
    """Dump the composition graph of a target.

    Compositions give their nodes and qubit pairs, networks their agents and
    channel pairs. The default output is a DOT description.
    """
    path, target = split_target(first, second)
    client = get_client(config, profile)
    res = client.graph(target, path)
    printer = printers.get_graph_printer(_output_format(client, output_format), target)
    printer.print(res)


@cli.command('list-builtins')
@click_option_output_format
@click_option_config
@click_option_profile
@click_option_verbose
@click.pass_context
@error_printer
def list_builtins(ctx, output_format, config, profile, verbose):
    """List builtin protocols."""
    client = get_client(config, profile)
    res = client.list_builtins()
    printer = printers.get_builtins_printer(_output_format(client, output_format))
    printer.print(res)


@cli.command()
@click.argument('name')
@click_option_config
@click_option_profile
@click_option_verbose
@click.pass_context
@error_printer
def describe(ctx, name, config, profile, verbose):
    """Display the description of a builtin protocol."""
    client = get_client(config, profile)
    description = client.describe_builtin(name)
    renderer = consolemd.Renderer()
    renderer.render(description)


if __name__ == '__main__':
    cli()
