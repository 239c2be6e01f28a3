"""Network analysis of political discourse and political relation networks.

Two halves share the graph-statistics core:

* text: :mod:`polnet.corpus`, :mod:`polnet.sentiment`, :mod:`polnet.wordgraph`
* actors: :mod:`polnet.sbm` (stochastic block model, ICL, goodness of fit)

:mod:`polnet.graphstats` computes the descriptive statistics and centralities
used by both.
"""

__version__ = "0.1.0"
