#!/usr/bin/env python
import os
import re
import sys

# require python 3.9 or newer
if sys.version_info < (3, 9):
    print("Error: svrgol does not support this version of Python.")
    print("Please upgrade to Python 3.9 or higher.")
    sys.exit(1)


from setuptools import find_packages, setup

# pull long description from README
this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, "README.md")) as f:
    long_description = f.read()


# get this package's version from svrgol/__version__.py
def _get_version():
    _version_path = os.path.join(this_directory, "svrgol", "__version__.py")
    _semver = r"""(?P<major>\d+)\.(?P<minor>\d+)\.(?P<patch>\d+)"""
    _pre = r"""((?P<prekind>a|b|rc)(?P<pre>\d+))?"""
    _version_pattern = rf"""version\s*=\s*["'](?P<version>{_semver}{_pre})["']"""
    with open(_version_path) as f:
        match = re.search(_version_pattern, f.read().strip())
        if match is None:
            raise ValueError(f"invalid version at {_version_path}")
        return match.group("version")


package_name = "svrgol"
# make sure this always matches svrgol/__version__.py
package_version = "0.4.0"
description = """Variance-reduced gradients for black-box online learners, with a parallel batch phase"""

if _get_version() != package_version:
    raise ValueError(f"setup.py version {package_version} does not match svrgol/__version__.py")

setup(
    name=package_name,
    version=package_version,
    description=description,
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["svrgol", "svrgol.*"]),
    include_package_data=True,
    install_requires=[
        "numpy>=1.22,<3.0",
        "scipy>=1.8,<2.0",
        "pydantic>=2.5,<3.0",
        "pydantic-settings>=2.1,<2.3",
        "pyyaml>=6.0",
    ],
    entry_points={
        "console_scripts": [
            "svrgol = svrgol.cli.main:main",
        ],
    },
    zip_safe=False,
    classifiers=[
        "Development Status :: 4 - Beta",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
)
