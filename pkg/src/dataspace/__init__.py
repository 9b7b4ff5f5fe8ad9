"""Self-contained dataspace kernel for materials data: RDF store with
SPARQL, k-item management, semantic file ingest, search, app workflows with
provenance, tensile evaluation and material cards, catalog connectors, and
a REST/CLI gateway."""

from .space import Dataspace

__version__ = "0.1.0"

__all__ = ["Dataspace", "__version__"]
