"""Publication figures for pulse-dicke sweep outputs.

Consumes the three CSV schemas the simulator writes (fidelity sweep,
entropy map, negativity trace) and renders deterministic PNG + SVG
figures.  This package reads only the CSV files; it does not import the
simulator.
"""

from .plots import KINDS, PlotSpec, build_figure, render
from .schemas import (ENTROPY_HEADER, FIDELITY_HEADER, NEGATIVITY_HEADER,
                      EmptyTableError, FigureDataError, SchemaMismatchError,
                      load_table, load_tables)

__version__ = "0.1.0"
