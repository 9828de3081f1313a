from setuptools import setup


setup(
    version="0.1.0",
    name="mct-hfr",
    description=(
        "modality-collaborative transformer with hybrid feature "
        + "reconstruction for incomplete multimodal emotion recognition"
    ),
    license="MIT",
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scikit-learn>=1.3",
    ],
    extras_require={
        "dev": ["pytest>=8", "pytest-cov>=5"],
    },
    packages=[
        "mct_hfr",
        "mct_hfr.cli",
        "mct_hfr.datasim",
        "mct_hfr.evalkit",
        "mct_hfr.hfr",
        "mct_hfr.mct",
        "mct_hfr.models",
        "mct_hfr.tensorlab",
        "mct_hfr.trainer",
    ],
    package_data={
        "mct_hfr": ["py.typed"],
    },
    entry_points={
        "console_scripts": [
            "mct-hfr = mct_hfr.cli.app:main",
        ],
    },
)
