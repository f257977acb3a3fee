"""Minimum-latency routing over free-space optical LEO satellite networks.

Subpackages and modules:

* :mod:`fsolatency.orbital`    Walker-delta propagation and ground geometry
* :mod:`fsolatency.linkbudget` optical transmit-power models
* :mod:`fsolatency.netgraph`   per-slot latency/power cost graphs
* :mod:`fsolatency.routing`    multi-commodity link-disjoint routing solvers
* :mod:`fsolatency.studio`     scenarios, sweeps and CSV reports
"""

__version__ = "0.1.0"
