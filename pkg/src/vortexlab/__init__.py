"""2D point-vortex and vortex-patch laboratory."""

from .core import ParticleCloud, PointVortexSystem, SimulationState, kernel, perp
from .pointvortex import (
    InvariantReport,
    Trajectory,
    integrate,
    integrate_fixed_rk4,
    invariants,
    rhs,
)
from .configlab import (
    LemmaReport,
    LemmaThresholds,
    SelfSimilarFit,
    SimilarityDecomposition,
    check_harmonic,
    find_expanding_config,
    gradient_parallelism,
    lemma_hypotheses,
    lemma_passes,
    recentre,
    self_similarity_fit,
    similarity_decompose,
)
from .patches import (
    DirectBackend,
    PatchSpec,
    RunConfig,
    TreeBackend,
    discretize_patch,
    induced_velocity,
    induced_velocity_tree,
    initial_state,
    run,
    step,
)
from .tree import TreeParams
from .diagnostics import (
    ConcentrationReport,
    ExponentFit,
    MomentReport,
    bootstrap_report,
    center_of_mass,
    concentration_radius,
    f_moment,
    growth_exponent,
    interaction_energy,
    moment,
    renormalization_check,
    sin_moment,
    support_radius,
)

# The configuration used throughout the examples: circulations (-2, -2, 1)
# with seed positions (-1,0), (1,0), (1, sqrt(2)); recentre() moves it to
# the zero-linear-impulse frame where it expands self-similarly.
import numpy as _np


def example_configuration() -> PointVortexSystem:
    return PointVortexSystem(
        positions=_np.array([[-1.0, 0.0], [1.0, 0.0], [1.0, _np.sqrt(2.0)]]),
        circulations=_np.array([-2.0, -2.0, 1.0]),
    )


__all__ = [name for name in dir() if not name.startswith("_")]
