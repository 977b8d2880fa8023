"""Export scikit-learn tree ensembles to the portable forest model JSON schema."""

from .export import UnsupportedEstimatorError, export_model

__version__ = "0.1.0"
