from setuptools import setup, find_packages
import os

# Read the contents of README.md file
with open(os.path.join(os.path.dirname(__file__), 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name="mpdetect",
    version="0.1.0",
    description="Message-passing detection of discrete signals with annealed denoising "
                "and a correlated-MIMO Monte-Carlo harness",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="Apache-2.0",
    packages=find_packages(include=["mpdetect", "mpdetect.*"]),
    install_requires=[
        "numpy>=1.22,<3.0",
        "scipy>=1.8,<2.0",
        "click>=8.0,<9.0",
        "python-dotenv>=1.0.0,<2.0.0",
        "appdirs>=1.4.4,<2.0.0",
        "rich>=13.0.0,<15.0.0",
    ],
    entry_points={
        'console_scripts': [
            'mpdetect=mpdetect.cli.main:main',
        ],
    },
    extras_require={
        'dev': [
            'pytest>=7.4.0',
            'pytest-cov',
            'tox',
            'flake8',
            'black',
        ],
    },
    python_requires='>=3.8,<4.0',
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
)
