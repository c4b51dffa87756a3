"""Exception hierarchy for toruslab."""


class TorusLabError(Exception):
    """Base class for all toruslab errors."""


class DegenerateMetric(TorusLabError):
    """Metric tensor is (numerically) degenerate at some point."""


class IndexChanged(TorusLabError):
    """A perturbation altered the signature of the metric."""


class RankDeficient(TorusLabError):
    """Distribution frame vectors are not linearly independent on the grid."""


class ZeroVelocity(TorusLabError):
    """Causal character is undefined for the zero vector."""


class StepFailure(TorusLabError):
    """ODE step-size control failed or the integration lost accuracy."""


class NotAGeodesic(TorusLabError):
    """Loop does not satisfy the geodesic equation within tolerance."""


class LightlikeGeodesic(TorusLabError):
    """Operation requires a non-lightlike geodesic."""


class ConstantLoop(TorusLabError):
    """Loop is constant (or below the energy floor)."""


class CapacityExceeded(TorusLabError):
    """Requested sample count exceeds the configured capacity."""


class NoConvergence(TorusLabError):
    """Newton iteration did not converge within the iteration budget."""


class CollapsedToConstant(TorusLabError):
    """Newton iterate fell below the energy floor."""


class DegeneracyOnPath(TorusLabError):
    """Continuation hit a degenerate geodesic and bisection depth ran out."""


class MetricPathDegenerate(TorusLabError):
    """Some convex combination along a metric path fails nondegeneracy."""


class TangentJacobiField(TorusLabError):
    """Jacobi field is (numerically) parallel to the tangent field."""


class NoValidSubinterval(TorusLabError):
    """No subinterval with the injectivity/independence preconditions."""


class DegenerateRecord(TorusLabError):
    """Operation requires a nondegenerate geodesic record."""


class BudgetExhausted(TorusLabError):
    """Perturbation trial budget ran out before success."""


class ConfigError(TorusLabError):
    """Invalid experiment configuration."""
