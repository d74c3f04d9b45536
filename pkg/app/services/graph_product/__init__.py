"""Graph product service module."""
from app.services.graph_product.graph_product_service import GraphProductService, graph_product_service

__all__ = ["GraphProductService", "graph_product_service"]
