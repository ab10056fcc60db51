"""Figure rendering for the spectral hydrostatic-flow toolkit's CSV outputs."""

from .report import (
    FIGURES,
    FORMATS,
    ReportSpec,
    SchemaError,
    build_decay_figure,
    build_energy_figure,
    build_gronwall_figure,
    build_norms_figure,
    fit_line,
    read_columns,
    render,
)

__all__ = [
    "FIGURES",
    "FORMATS",
    "ReportSpec",
    "SchemaError",
    "build_decay_figure",
    "build_energy_figure",
    "build_gronwall_figure",
    "build_norms_figure",
    "fit_line",
    "read_columns",
    "render",
]

__version__ = "0.1.0"
