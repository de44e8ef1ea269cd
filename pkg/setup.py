#!/usr/bin/env python3
"""
Emptiness - XXZ emptiness formation probability toolkit
Setup script for building and packaging the application.
"""

from setuptools import setup, find_packages


# Read the README file for long description
def read_readme():
    """Read README.md file for long description."""
    with open("README.md", "r", encoding="utf-8") as fh:
        return fh.read()


# Read requirements from requirements.txt, up to the testing section
def read_requirements():
    """Read runtime requirements from requirements.txt."""
    requirements = []
    with open("requirements.txt", "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line == "# Testing":
                break
            if line and not line.startswith("#"):
                requirements.append(line)
    return requirements


# Package configuration
setup(
    name="emptiness",
    version="0.1.0",
    description="Emptiness formation probability of the XXZ model: exact, loop Monte Carlo and six-vertex routes",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
            "hypothesis>=6.82.0",
            "black>=23.7.0",
            "flake8>=6.0.0",
            "mypy>=1.5.1",
        ],
    },
    entry_points={
        "console_scripts": [
            "emptiness=emptiness.main:main",
        ],
    },
    keywords=[
        "XXZ chain",
        "emptiness formation probability",
        "quantum Monte Carlo",
        "six-vertex model",
        "exact diagonalization",
    ],
    zip_safe=False,
)
