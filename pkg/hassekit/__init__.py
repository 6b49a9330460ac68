"""hassekit - exact local invariants and local-global decisions for
embeddings of étale algebras with involution over the rationals."""

__version__ = "0.1.0"
