"""Publication-style figures from mechqubit CSV datasets."""

from .render import (
    DEVICE_LAMBDA_BAND,
    FIGURE_KINDS,
    FigureSpec,
    MissingColumnError,
    RenderResult,
    file_checksum,
    load_columns,
    render,
)

__version__ = "0.1.0"
