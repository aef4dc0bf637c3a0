"""Victim service: train small text classifiers and serve them over HTTP.

The server speaks the classifier/encoder wire protocol:

 - GET  /info      -> {"num_labels": K, "label_names": [...]}
 - POST /classify  {"texts": [...]} -> {"probabilities": [[K floats], ...]}
 - POST /encode    {"texts": [...]} -> {"vectors": [[d floats], ...]}

plus a data generator for a small synthetic sentiment corpus and the
substitution resources needed to attack it.
"""

__version__ = "0.1.0"

from victim_service.embeddings import EmbeddingTable
from victim_service.linear import LinearJsonModel
from victim_service.server import build_app

__all__ = ["EmbeddingTable", "LinearJsonModel", "build_app", "__version__"]
