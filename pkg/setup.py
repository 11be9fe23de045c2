#!/usr/bin/env python3
import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

CLASSIFIERS = """\
Development Status :: 3 - Alpha
Intended Audience :: Science/Research
Intended Audience :: Developers
License :: OSI Approved :: BSD License
Programming Language :: Python :: 3
Programming Language :: Python :: 3.8
Programming Language :: Python :: 3.9
Programming Language :: Python :: 3.10
Programming Language :: Python :: 3.11
Programming Language :: Python :: 3 :: Only
Operating System :: OS Independent
Typing :: Typed
Topic :: Scientific/Engineering
Topic :: Scientific/Engineering :: Physics
Topic :: Security :: Cryptography
Operating System :: Microsoft :: Windows
Operating System :: POSIX
Operating System :: Unix
Operating System :: MacOS
"""

setuptools.setup(
    name="qdcryptpy",
    version="0.1.0",
    author="qdcryptpy developers",
    description="Benchmark quantum-cryptographic primitives under quantum-dot and Poisson photon sources",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license='BSD',
    platforms='Independent',
    packages=setuptools.find_packages(exclude=("tests",)),
    classifiers=[_f for _f in CLASSIFIERS.split('\n') if _f],
    python_requires='>=3.8',
    install_requires=["numpy>=1.21", "scipy>=1.7", "protobuf>=3.19.4"],
    extras_require={"plot": ["matplotlib>=3.4"]},
    entry_points={"console_scripts": ["qdcrypt = qdcryptpy._cli:main"]},
)
