from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [
        line.strip() for line in fh
        if line.strip() and not line.startswith("#") and not line.startswith("pytest")
    ]

setup(
    name="impurity-entanglement",
    version="1.0.0",
    description="Entanglement negativity between a fermionic impurity level and discretized baths",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    packages=find_packages(),
    python_requires=">=3.8",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=6.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "impurity-entanglement=src.main:main",
        ],
    },
    include_package_data=True,
    package_data={
        "src": ["config/*.yaml", "config/presets/*.yaml"],
    },
    keywords="entanglement negativity, free fermions, quantum impurity, resonant level model, quantum transport",
)
