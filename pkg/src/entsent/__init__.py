"""Entity-aware sentiment for financial news headlines and its after-market return analysis."""

__version__ = "0.1.0"
