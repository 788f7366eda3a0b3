"""
Shifted moments and their Hoelder decomposition.
"""
