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

import logging

import networkx as nx

from dqvm import runner
from dqvm.sdk import composer, definitions, library, network, patterns
from dqvm.sdk import config as cfg

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = 'builtin:'


class Client(object):

    def __init__(self, config_path=None, profile_name=None):
        self._cfg_manager = cfg.Manager(config_path or cfg.DEFAULT_PATH)
        self._current_profile = None
        self._profiles = {}
        self._programs = {}

        if profile_name:
            self.set_profile(profile_name)

    def _set_current_profile(self, profile_name, profile):
        """Set client current profile."""
        self._profiles[profile_name] = profile
        self._current_profile = profile
        return profile

    def set_profile(self, profile_name):
        """Set profile from profile name.

        If profiles has not been defined through the `add_profile` method, it is loaded
        from the config file; a missing config file gives the built-in defaults.
        """
        try:
            profile = self._profiles[profile_name]
        except KeyError:
            profile = self._cfg_manager.settings(profile_name)

        return self._set_current_profile(profile_name, profile)

    def add_profile(self, profile_name, mode=cfg.DEFAULT_MODE, seed=None,
                    tolerance=cfg.DEFAULT_TOLERANCE, format=cfg.DEFAULT_FORMAT):
        """Add new profile (in-memory only)."""
        profile = cfg.create_profile(mode=mode, seed=seed, tolerance=tolerance, format=format)
        return self._set_current_profile(profile_name, profile)

    @property
    def settings(self):
        if self._current_profile is None:
            self.set_profile(cfg.DEFAULT_PROFILE_NAME)
        return dict(self._current_profile)

    def load(self, path):
        """Load a definition file.

        Raises:
            IOError: if the file cannot be read.
        """
        if path not in self._programs:
            logger.debug(f"Loading definitions from '{path}'")
            self._programs[path] = definitions.load_file(path)
        return self._programs[path]

    def resolve(self, target, path=None):
        """Value of a target: ``builtin:NAME[:ARG...]`` or a name.

        Names resolve to the definitions of the file first, then to builtins.
        """
        if target.startswith(BUILTIN_PREFIX):
            return library.build(target[len(BUILTIN_PREFIX):])
        if path is not None:
            program = self.load(path)
            if target in program:
                return program.build(target)
        return library.build(target)

    def validate(self, path):
        """Diagnostics of every definition of a file, empty when all are valid."""
        return self.load(path).validate()

    def compile(self, target, path=None):
        """Merged pattern or compiled network of a target."""
        value = self.resolve(target, path)
        if isinstance(value, composer.CompositionExpr):
            return composer.compile_composition(value, name=target)
        if isinstance(value, patterns.Pattern):
            return patterns.check_pattern(value)
        if isinstance(value, network.NetworkDef):
            patterns.check_pattern(value.resource)
            return network.compile_network(value)
        return value

    def run(self, target, path=None, config=None):
        config = config or runner.RunConfig(
            mode=self.settings['mode'],
            seed=self.settings['seed'],
            tolerance=self.settings['tolerance'],
        )
        value = self.resolve(target, path)
        return runner.run(target, value, config)

    def graph(self, target, path=None):
        """Composition DAG, agent graph or single node of a target."""
        if target.startswith(BUILTIN_PREFIX):
            entry, _ = library.parse_builtin(target[len(BUILTIN_PREFIX):])
            if entry.graph is not None:
                return composer.composition_graph(entry.graph())
        value = self.resolve(target, path)
        if isinstance(value, composer.CompositionExpr):
            composer.check_links(value)
            composer.toposort(value)
            return composer.composition_graph(value)
        if isinstance(value, network.NetworkDef):
            return network.network_graph(value)
        graph = nx.DiGraph()
        if isinstance(value, patterns.Pattern):
            graph.add_node(target, index=0, pattern=value.name,
                           inputs=list(value.inputs), outputs=list(value.outputs))
        else:
            graph.add_node(target, label=f"{target}: agent sort={list(value.qubit_sort)}")
        return graph

    def dot(self, target, path=None):
        return composer.to_dot(self.graph(target, path), name=target)

    def list_builtins(self):
        return [
            {
                'name': entry.name,
                'kind': entry.kind,
                'params': [name for name, _ in entry.params],
                'defaults': list(entry.defaults),
            }
            for entry in library.BUILTINS.values()
        ]

    def describe_builtin(self, name):
        """Markdown description of a builtin protocol."""
        entry = library.get_entry(name)
        form = entry().to_sexpr()
        params = ', '.join(f"`{p}` (default {d})" for (p, _), d in zip(entry.params,
                                                                       entry.defaults))
        lines = [
            f"# {entry.name}",
            '',
            entry.description,
            '',
            f"Kind: {entry.kind}",
        ]
        if params:
            lines += ['', f"Parameters: {params}"]
        lines += ['', '```', str(form), '```', '']
        return '\n'.join(lines)
