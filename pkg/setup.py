"""setup.py"""
from setuptools import setup

with open("README.md") as f:
    README = f.read()

setup(
    classifiers=[
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    description="Weight re-mapping for variational quantum classifiers",
    entry_points={"console_scripts": ["vqcremap = vqcremap.main:main"]},
    include_package_data=True,
    install_requires=[
        "jsonschema<5",
        "numpy>=1.20",
        "oslash<1",
        "pandas>=1.2",
        "scipy>=1.6",
    ],
    license="MIT",
    long_description=README,
    long_description_content_type="text/markdown",
    name="vqcremap",
    # Be PEP 561 compliant
    # https://mypy.readthedocs.io/en/stable/installed_packages.html#making-pep-561-compatible-packages
    package_data={
        "vqcremap": [
            "checkpoint-schema.json",
            "config-schema.json",
            "iris.data",
            "py.typed",
        ]
    },
    zip_safe=False,
    packages=["vqcremap"],
    python_requires=">=3.8",
    version="1.0.0",
)
