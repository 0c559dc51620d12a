"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: config problems exit 4,
hypothesis-gate failures exit 2, numerical non-convergence exits 3.
"""


class HypmassError(Exception):
    pass


class ParameterError(HypmassError):
    """Invalid construction parameters (support touching the pole, bad annulus)."""


class ConfigError(HypmassError):
    """Malformed or inconsistent run configuration."""


class HypothesisGateError(HypmassError):
    """A theorem hypothesis gate (scalar curvature, decay order) failed under --strict."""


class QuadratureError(HypmassError):
    """Tail or panel quadrature failed to converge."""


class LevelRangeError(HypmassError):
    """Requested level lies outside the resolved range of u."""


class CriticalLevelError(HypmassError):
    """Level curve meets cells flagged as critical (|grad u| below threshold)."""


class NonConvergenceError(HypmassError):
    """Iterative solver failed to reach its tolerance."""


class FitWindowError(HypmassError):
    """Expansion fit window too narrow to be well conditioned."""
