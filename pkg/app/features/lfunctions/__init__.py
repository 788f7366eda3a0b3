"""
Dirichlet L-values: Hurwitz reference and approximate functional equation.
"""
