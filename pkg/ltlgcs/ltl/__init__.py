"""
Formulas, their semantics over words, and automata for them.
"""
