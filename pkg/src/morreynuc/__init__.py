"""Compactness and nuclearity of embeddings between Morrey-type smoothness spaces."""

__version__ = "0.1.0"
