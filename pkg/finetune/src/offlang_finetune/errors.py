class FinetuneError(Exception):
    """Any user-correctable failure; the CLI maps it to exit code 1."""
