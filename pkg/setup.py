# Metadata, the src/ layout and the console script are declared in pyproject.toml.
# This shim keeps editable installs working with setuptools versions that still look
# for a setup.py.

from setuptools import setup

setup()
