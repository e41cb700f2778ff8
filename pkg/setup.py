#!/usr/bin/env python

from setuptools import setup, find_packages

version = "0.1.0"

with open("README.md") as f:
    readme = f.read()

with open("requirements.txt") as f:
    required = f.read().splitlines()

setup(
    name="semcom_tools",
    version=version,
    description="Simulation tools for channel-adaptive layered semantic communication.",
    long_description=readme,
    long_description_content_type="text/markdown",
    keywords=[
        "semantic communication",
        "superposition coding",
        "fading channel",
        "successive interference cancellation",
        "simulation",
    ],
    license="GNU GENERAL PUBLIC LICENSE v.3",
    entry_points={
        "console_scripts": ["semcom-tools=semcom_tools.__main__:run_semcom_tools"]
    },
    install_requires=required,
    packages=find_packages(exclude=("docs")),
    package_data={
        "semcom_tools": ["conf/*.json", "schema/*.json", "example_data/*", "example_data/configs/*"]
    },
    include_package_data=True,
    zip_safe=False,
)
