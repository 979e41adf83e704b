"""Exception types shared across the package."""


class DegenerateInputError(ValueError):
    """Raised when an input carries no usable variation.

    Typical causes: a constant curve (zero detail energy), an all-zero
    spectrum, or a vanishing auto-spectrum in a coherence denominator.
    """
