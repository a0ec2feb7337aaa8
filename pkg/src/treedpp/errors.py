"""Package-wide exception types."""


class CapExceeded(Exception):
    """An enumeration would exceed its configured cap.

    The message names the cap so callers know which limit to raise.
    """
