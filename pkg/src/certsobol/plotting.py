"""SVG chart of the convergence table.

Rendering needs the optional ``plot`` extra (matplotlib). The figure is drawn
through the object-oriented API (no global pyplot state), with a fixed hash
salt and no date so identical tables give identical files.
"""

import logging
from pathlib import Path
from typing import Union

import pandas as pd

logger = logging.getLogger(__name__)

HASH_SALT = "certsobol"


def render_convergence_svg(frame: pd.DataFrame, path: Union[str, Path], *, title: str = "nu") -> bool:
    """Plot the sandwich bounds and the combined interval against the basis size.

    :param frame: table with columns ``n, s_min, s_max, ci_lo, ci_hi``
    :type frame: pd.DataFrame
    :param path: destination ``.svg`` file
    :type path: Union[str, Path]
    :return: ``False`` when matplotlib is not installed
    :rtype: bool
    """
    try:
        import matplotlib
        from matplotlib.backends.backend_svg import FigureCanvasSVG
        from matplotlib.figure import Figure
    except ImportError:
        logger.warning("matplotlib is not installed; skipping %s", path)
        return False

    with matplotlib.rc_context({"svg.hashsalt": HASH_SALT, "svg.fonttype": "none"}):
        figure = Figure(figsize=(6.4, 4.0))
        FigureCanvasSVG(figure)
        axes = figure.add_subplot()
        axes.plot(frame["n"], frame["s_min"], marker="o", color="tab:blue", label="lower bound")
        axes.plot(frame["n"], frame["s_max"], marker="o", color="tab:orange", label="upper bound")
        axes.plot(frame["n"], frame["ci_lo"], linestyle="--", color="tab:blue", label="interval lower end")
        axes.plot(frame["n"], frame["ci_hi"], linestyle="--", color="tab:orange", label="interval upper end")
        axes.set_xlabel("reduced basis size n")
        axes.set_ylabel(f"first-order index of {title}")
        axes.grid(True, alpha=0.3)
        axes.legend(loc="best")
        figure.savefig(path, format="svg", metadata={"Date": None})
    return True
