"""
Utility Module

Configuration, logging and file helpers used across modules.
"""
