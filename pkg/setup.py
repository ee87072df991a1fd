import os

from setuptools import find_packages, setup

with open(os.path.join(os.path.dirname(__file__), "README.rst")) as readme:
    README = readme.read()

# allow setup.py to be run from any path
os.chdir(os.path.normpath(os.path.join(os.path.abspath(__file__), os.pardir)))

requirements = [
    "cached-property>=1.5; python_version < '3.8'",
    "jsonschema>=3.2",
    "numpy>=1.20",
    "scipy>=1.7",
    "typing-extensions>=3.10; python_version < '3.8'",
]

setup(
    name="cartan-py",
    version="0.1.0",
    packages=find_packages(exclude=["examples", "examples.*"]),
    package_data={"cartan": ["py.typed"]},
    install_requires=requirements,
    include_package_data=True,
    python_requires=">=3.7",
    license="MIT License",
    description="Developments, transport and map reconstruction on Riemannian charts",
    long_description=README,
    entry_points={"console_scripts": ["cah-cli=cartan.cli:main"]},
    keywords=["riemannian", "development", "parallel transport", "cartan", "ode"],
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
