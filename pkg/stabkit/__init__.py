"""
stabkit: exact stabilizer-code decoding, coset enumerators, and weight
enumerator extraction through a degenerate maximum-likelihood decoder.
"""

__version__ = "0.1.0"
