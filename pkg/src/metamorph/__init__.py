"""Phase-space integral transform with Gaussian-oscillatory kernel and its calculus.

The transform maps ``f`` on the real line to a function of ``(x, y, b, r)``.
Submodules:

``core``          domain types and the ``(x, y, b, r) <-> (z, w)`` chart
``closed_forms``  exact transforms used as oracles
``transform``     quadrature forward/inverse transform, pairing, reproduction
``jets``          holomorphic jets, annihilators, order-reducing operators
``helmholtz``     Helmholtz solutions and Gaussian beams
``io``            CSV/PGM field files and JSON scenarios
``estimators``    scikit-learn style wrappers
"""

from .closed_forms import (
    PlaneWaveSpec,
    WavePacketSpec,
    delta_metamorphism,
    gaussian_integral,
    plane_wave_f2,
    plane_wave_metamorphism,
    reproducing_kernel,
    wave_packet_f2,
    wave_packet_metamorphism,
)
from .core import (
    Axis,
    ComplexChart,
    GridSpec,
    PhasePoint,
    QuadratureSpec,
    ReferenceSheet,
    SampledField,
    complex_to_phase,
    phase_to_complex,
    principal_sqrt,
)
from .estimators import GaussianBeam, Metamorphism
from .exceptions import (
    BoundaryDecayError,
    BranchConsistencyError,
    MetamorphError,
    QuadratureError,
    ScenarioError,
    StencilError,
)
from .helmholtz import (
    BeamSpec,
    MultiChart,
    full_metamorphism_2d,
    gaussian_beam_f3,
    helmholtz_residual,
    lift_f3_to_f4,
    lift_f5_to_f6,
    plane_wave_f4,
    reconstruct_physical_field,
    residual_ratio,
    structural_residuals_2d,
    structural_residuals_3d,
    transmuted_residual_2d,
    transmuted_residual_3d,
)
from .jets import (
    FdScheme,
    HoloJet,
    apply_annihilator,
    apply_D,
    apply_D0,
    lift_G,
    schrodinger_coords,
    structural_residual,
)
from .transform import SourceFunction, forward, forward_grid, inverse, pairing, reproduce

__all__ = [
    "PlaneWaveSpec",
    "WavePacketSpec",
    "delta_metamorphism",
    "gaussian_integral",
    "plane_wave_f2",
    "plane_wave_metamorphism",
    "reproducing_kernel",
    "wave_packet_f2",
    "wave_packet_metamorphism",
    "Axis",
    "ComplexChart",
    "GridSpec",
    "PhasePoint",
    "QuadratureSpec",
    "ReferenceSheet",
    "SampledField",
    "complex_to_phase",
    "phase_to_complex",
    "principal_sqrt",
    "GaussianBeam",
    "Metamorphism",
    "BoundaryDecayError",
    "BranchConsistencyError",
    "MetamorphError",
    "QuadratureError",
    "ScenarioError",
    "StencilError",
    "BeamSpec",
    "MultiChart",
    "full_metamorphism_2d",
    "gaussian_beam_f3",
    "helmholtz_residual",
    "lift_f3_to_f4",
    "lift_f5_to_f6",
    "plane_wave_f4",
    "reconstruct_physical_field",
    "residual_ratio",
    "structural_residuals_2d",
    "structural_residuals_3d",
    "transmuted_residual_2d",
    "transmuted_residual_3d",
    "FdScheme",
    "HoloJet",
    "apply_annihilator",
    "apply_D",
    "apply_D0",
    "lift_G",
    "schrodinger_coords",
    "structural_residual",
    "SourceFunction",
    "forward",
    "forward_grid",
    "inverse",
    "pairing",
    "reproduce",
]

__version__ = "0.1.0"
