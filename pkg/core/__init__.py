"""
cstar-linac source root: the linac library, logging and the command line.
"""
