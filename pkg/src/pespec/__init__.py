"""Spectral toolkit for hydrostatic flows on anisotropic tori.

Submodules are imported lazily so that entry points can configure
threading environment variables before any numerical library loads.
"""

__version__ = "0.1.0"

_SUBMODULES = (
    "torus",
    "lp",
    "besov",
    "hydrostatic",
    "rng",
    "fields",
    "solver",
    "analysis",
    "suite",
    "cli",
)


def __getattr__(name):
    if name in _SUBMODULES:
        import importlib

        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(_SUBMODULES))
