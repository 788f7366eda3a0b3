"""
Complex Gamma, Riemann zeta and Hurwitz zeta.
"""
