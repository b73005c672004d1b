class OfflangError(Exception):
    """Raised for any invalid input, file, or configuration the toolkit rejects.

    The CLI maps this to exit code 1; messages carry enough context
    (line numbers, config keys, offending values) to act on.
    """
