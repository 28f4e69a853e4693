"""Observation scheduling for agile Earth-observation satellites.

The package models a multi-satellite scheduling problem: missions ask for
one continuous observation inside visible time windows offered by imaging
resources, subject to per-resource setup times and usage budgets.  It
provides instance ingestion and generation, conflict-analysis based
preprocessing, two mixed-integer linear formulations with LP/MPS export,
an exact branch-and-bound solver with a brute-force oracle, a schedule
validator, and reporting utilities.
"""

__version__ = "0.1.0"
