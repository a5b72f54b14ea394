"""Learning stratified possibilistic logic theories from default rules."""

__version__ = "0.1.0"
