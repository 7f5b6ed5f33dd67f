"""Opinion mining of short informal text: two-stage subjectivity/polarity classification."""

__version__ = "0.1.0"
