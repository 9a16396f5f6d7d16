#!/usr/bin/env python
# Copyright (C) The DChannel Authors
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 51 Franklin St, Fifth Floor, Boston, MA  02110-1301  USA

from setuptools import find_packages
from setuptools import setup

setup(
    name='dchannel',
    version='1.0.0',
    description='D-band MIMO channel simulator built on measured '
                'statistics',
    license='GPLv3+',
    packages=find_packages(exclude=['tests']),
    py_modules=['DChannel'],
    package_data={'dchannel': ['data/*.json']},
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.9',
        'pandas>=1.5',
        'pydantic>=2.0',
    ],
    extras_require={
        'test': ['pytest>=7'],
        'docs': ['sphinx'],
    },
    entry_points={
        'console_scripts': ['dchannel=DChannel:main'],
    },
)
