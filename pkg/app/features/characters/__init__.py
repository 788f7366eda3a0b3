"""
Dirichlet characters, character groups and exponential sums.
"""
