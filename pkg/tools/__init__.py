"""
Developer scripts for the purify project.
"""
