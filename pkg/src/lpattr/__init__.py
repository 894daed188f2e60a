"""Scalar encodings of a fixed linear program, small neural surrogates
trained on them, and feature-attribution methods applied to the surrogates.
"""

__version__ = "0.1.0"
