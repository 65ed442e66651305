"""Exception types shared across the toolkit."""


class InfeasibleLevelError(ValueError):
    """A membership level c for which the class F_c is empty (c > 1/2),
    or a quadratic bound whose discriminant is negative."""


class CriticalPointError(ValueError):
    """f'(z) vanishes, so f is not locally univalent at z."""


class ConvergenceError(RuntimeError):
    """A numerical integration or root solve missed its tolerance."""
