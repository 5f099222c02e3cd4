"""Valence analysis and synthesis for rational real Smirnov functions.

A rational function holomorphic on the unit disk whose radial boundary
values are real almost everywhere can be written as i(B1+B2)/(B1-B2) for a
pair of relatively prime finite Blaschke products with B1-B2 outer.  This
package computes how many times such a function covers each point (its
valence), extracts the signed tree that encodes the covering structure,
validates and enumerates such trees, and synthesizes functions realizing a
given tree.
"""

__version__ = "0.1.0"
