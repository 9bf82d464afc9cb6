""" mcgraph: matrix completion under deterministic sampling patterns. """
