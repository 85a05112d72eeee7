"""Video-context many-speaker dialogue: corpus building, models, evaluation."""

__version__ = "0.1.0"
