"""Method-level third-party library migration mining for Java projects."""

__version__ = "0.1.0"
