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

"""Packaging settings."""
from codecs import open
import os

from setuptools import setup, find_packages

here = os.path.abspath(os.path.dirname(__file__))


with open(os.path.join(here, 'README.md'), 'r', 'utf-8') as fp:
    readme = fp.read()


about = {}
with open(os.path.join(here, 'dqvm', '__version__.py'), 'r', 'utf-8') as fp:
    exec(fp.read(), about)


setup(
    name='dqvm',
    version=about['__version__'],
    description='Virtual machine for distributed measurement-based quantum programs',
    long_description=readme,
    long_description_content_type='text/markdown',
    author='The dqvm authors',
    license='Apache 2.0',
    classifiers=[
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: Apache Software License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
    ],
    keywords=['cli', 'quantum', 'measurement calculus', 'mbqc'],
    packages=find_packages(exclude=['docs', 'tests*']),
    include_package_data=True,
    python_requires='>=3.7',
    install_requires=['click', 'consolemd', 'pyyaml', 'numpy', 'networkx>=3.4'],
    setup_requires=['pytest-runner'],
    tests_require=['pytest', 'pytest-cov', 'pytest-mock', 'hypothesis'],
    extras_require={
        'test': ['pytest', 'pytest-cov', 'pytest-mock', 'hypothesis'],
    },
    entry_points={
        'console_scripts': [
            'dqvm=dqvm.cli.interface:cli',
        ],
    },
    zip_safe=False,
)
