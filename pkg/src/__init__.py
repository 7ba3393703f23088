"""
ParkedTrees - generating functions of fully parked trees

Exact series, phase classification and coefficient asymptotics for
fully parked labeled plane trees, checked against enumeration and
Monte Carlo simulation.
"""

__version__ = "0.1.0"
__author__ = "ParkedTrees Team"
