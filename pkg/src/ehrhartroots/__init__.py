__all__ = [
    "config",
    "exact_arith",
    "polytope_geometry",
    "ehrhart_engine",
    "family_construction",
    "root_analysis",
    "graph_polytopes",
    "reporting",
    "cli",
]
