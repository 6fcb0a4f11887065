"""
Command-line front end: configuration loading, dispatch and result files.
"""
