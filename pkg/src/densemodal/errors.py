class InvariantError(Exception):
    """A runtime self-check failed; the result cannot be trusted."""
