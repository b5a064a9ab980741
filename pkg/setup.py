from setuptools import setup, find_packages
setup(
    name = "dlb",
    version = "0.1",
    description = "Discrete diffusion load balancing simulator",
    packages = find_packages(),
    python_requires = ">=3.8",
    install_requires = ["numpy", "scipy", "astropy", "pyyaml"],
    extras_require = {"test": ["pytest", "hypothesis"]},
    entry_points = {"console_scripts": ["dlb=dlb.cli:main"]},
    )
