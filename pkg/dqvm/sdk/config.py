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

import copy
import json
import logging
import os

logger = logging.getLogger(__name__)

DEFAULT_PATH = os.path.expanduser('~/.dqvm')
DEFAULT_PROFILE_NAME = 'default'
DEFAULT_MODE = 'enumerate'
DEFAULT_TOLERANCE = 1e-9
DEFAULT_FORMAT = 'report'

TOLERANCE_ENV = 'DQVM_TOL'

DEFAULT_CONFIG = {
    'default': {
        'mode': DEFAULT_MODE,
        'seed': None,
        'tolerance': DEFAULT_TOLERANCE,
        'format': DEFAULT_FORMAT,
    }
}


class ConfigException(Exception):
    pass


class ProfileNotFoundError(ConfigException):
    pass


def _read_config(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.decoder.JSONDecodeError:
            raise ConfigException(f"Cannot parse config file '{path}'")


def _write_config(path, config):
    with open(path, 'w') as fh:
        json.dump(config, fh, indent=2, sort_keys=True)


def create_profile(mode=DEFAULT_MODE, seed=None, tolerance=DEFAULT_TOLERANCE,
                   format=DEFAULT_FORMAT):
    """Create profile object."""
    return {
        'mode': mode,
        'seed': seed,
        'tolerance': tolerance,
        'format': format,
    }


def _add_profile(path, name, **settings):
    """Add profile to config file on disk."""
    try:
        config = _read_config(path)
    except FileNotFoundError:
        config = copy.deepcopy(DEFAULT_CONFIG)

    profile = create_profile(**settings)

    if name in config:
        config[name].update(profile)
    else:
        config[name] = profile

    _write_config(path, config)
    return config


def _load_profile(path, name):
    """Load profile from config file on disk.

    Raises:
        FileNotFoundError: if config file does not exist.
        ProfileNotFoundError: if profile does not exist.
    """
    logger.debug(f"Loading profile '{name}' from '{path}'")
    config = _read_config(path)
    try:
        return config[name]
    except KeyError:
        raise ProfileNotFoundError(name)


def env_tolerance():
    """Tolerance from the environment, None when unset."""
    value = os.environ.get(TOLERANCE_ENV)
    if value is None or value == '':
        return None
    try:
        tolerance = float(value)
    except ValueError:
        raise ConfigException(f"{TOLERANCE_ENV} must be a number, got '{value}'")
    if tolerance <= 0:
        raise ConfigException(f"{TOLERANCE_ENV} must be positive, got '{value}'")
    return tolerance


class Manager():
    def __init__(self, path=DEFAULT_PATH):
        self.path = path

    def add_profile(self, name, mode=DEFAULT_MODE, seed=None, tolerance=DEFAULT_TOLERANCE,
                    format=DEFAULT_FORMAT):
        """Add profile to config file on disk."""
        config = _add_profile(
            self.path,
            name,
            mode=mode,
            seed=seed,
            tolerance=tolerance,
            format=format,
        )
        return config[name]

    def load_profile(self, name):
        """Load profile from config file on disk.

        Raises:
            FileNotFoundError: if config file does not exist.
            ProfileNotFoundError: if profile does not exist.
        """
        return _load_profile(self.path, name)

    def settings(self, name=DEFAULT_PROFILE_NAME):
        """Profile values over built-in defaults; a missing file gives the defaults.

        The DQVM_TOL environment variable overrides the profile tolerance.
        """
        settings = dict(DEFAULT_CONFIG['default'])
        try:
            settings.update(self.load_profile(name))
        except FileNotFoundError:
            if name != DEFAULT_PROFILE_NAME:
                raise ProfileNotFoundError(name)
            logger.debug(f"No config file at '{self.path}', using defaults")
        tolerance = env_tolerance()
        if tolerance is not None:
            settings['tolerance'] = tolerance
        return settings
