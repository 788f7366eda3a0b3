"""
Prime sums, log|L| surrogate and mollifier Dirichlet polynomials.
"""
