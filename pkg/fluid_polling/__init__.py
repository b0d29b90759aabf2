"""
Fluid Polling
Analytics, simulators and verification harness for a two-queue random-time-limited fluid polling model
"""

__version__ = "1.0.0"
__author__ = "Fluid Polling Team"
