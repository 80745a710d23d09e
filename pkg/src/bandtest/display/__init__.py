"""Console summaries for experiments and bands."""
