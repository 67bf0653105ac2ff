"""cylsep: exact cylinder-separation profiles for self-similar IFSs.

Computes the level-n separation profile of an iterated function system
under exact arithmetic, decides exact-overlap parameter membership for two
built-in parameterised families, runs the nested-ball induction that
produces parameters whose cylinders are super-exponentially close without
ever overlapping exactly, and independently verifies the resulting
certificates.
"""

__version__ = "0.1.0"
