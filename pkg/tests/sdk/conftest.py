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

import numpy as np
import pytest

import dqvm

from .. import datastore


@pytest.fixture
def client(tmpdir):
    config_path = tmpdir / "dqvm.cfg"
    c = dqvm.Client(config_path=str(config_path))
    c.add_profile('test')
    return c


@pytest.fixture
def rng():
    return np.random.default_rng(2026)


def _write(tmpdir, name, text):
    path = tmpdir / name
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def program_path(tmpdir):
    return _write(tmpdir, "program.dqvm", datastore.PROGRAM)


@pytest.fixture
def broken_path(tmpdir):
    return _write(tmpdir, "broken.dqvm", datastore.BROKEN)


@pytest.fixture
def deadlock_path(tmpdir):
    return _write(tmpdir, "deadlock.dqvm", datastore.DEADLOCK)
