from setuptools import setup, find_packages

setup(
    name="simtile",
    version="0.1.0",
    packages=find_packages(exclude=["benchmarks", "benchmarks.*"]),
    package_data={"simtile": ["fixtures/*.json"]},
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.26.0",
        "scipy>=1.11.0",
        "pandas>=2.2.0",
        "pydantic>=2.10.6",
        "structlog>=25.2.0",
        "orjson>=3.9.15",
        "tenacity>=9.0.0",
        "tqdm>=4.66.2",
    ],
    entry_points={
        "console_scripts": [
            "simtile=simtile.cli:main",
        ],
    },
)
