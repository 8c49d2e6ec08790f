"""
Graphs of Convex Sets: construction from a product, and solution.
"""
