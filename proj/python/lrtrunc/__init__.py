"""Long-range percolation truncation toolkit."""

from ._lrtrunc import *  # noqa: F401,F403
from ._lrtrunc import __version__, run_config

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]


def run_config_text(text: str) -> dict:
    """Run an INI experiment and return columns, rows and provenance."""
    columns, rows, provenance = run_config(text)
    return {"columns": columns, "rows": rows, "provenance": dict(provenance)}
