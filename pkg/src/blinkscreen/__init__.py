"""Blink-asymmetry screening pipeline.

Frame-level eye-state classification feeds a per-video blink-similarity
feature; a small linear classifier over that single feature flags one-sided
blinking impairment.
"""

__version__ = "0.1.0"
