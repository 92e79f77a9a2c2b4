"""chartprop: evolution operators of driven 2- and 3-level systems.

Propagates chart coordinates (coupled complex Riccati equations plus
real phases) instead of the full matrix Schrodinger flow, rebuilds the
special-unitary evolution operator from them at any sample time, and
ships a direct matrix integrator as an independent cross-check.
"""

from .drives import (ConfigError, ConstantDrive, CosineDrive, GaussianDrive,
                     Hamiltonian2, Hamiltonian3, HamiltonianSample3,
                     PiecewiseDrive, RunConfig, SumDrive, config_to_dict,
                     drive_from_spec, parse_config, serialize_config)
from .integrate import (ChartSingularityError, ConvergenceScenario,
                        IntegrationError, IntegratorSettings,
                        NonFiniteDerivativeError, StepLimitError, Trajectory,
                        convergence_probe, integrate)
from .matrices import (HermitianTraceless, MatrixInvariantError,
                       UnitaryMatrix, adjoint, frobenius_distance,
                       frobenius_norm, hermitian_expm, multiply)
from .reference import (ComparisonReport, OracleTrajectory, compare,
                        exact_constant_unitaries, integrate_schrodinger,
                        schrodinger_residuals, unitarity_errors)
from .three_level import (ChartDerivative3, ChartState3, delta1, delta2,
                          initial_state3, log_delta_rates, reconstruct_u3,
                          rhs3)
from .two_level import (ChartDerivative2, ChartState2, initial_state2,
                        reconstruct_u2, rhs2)

__all__ = [
    "ChartDerivative2", "ChartDerivative3", "ChartSingularityError",
    "ChartState2", "ChartState3", "ComparisonReport", "ConfigError",
    "ConstantDrive", "ConvergenceScenario", "CosineDrive", "GaussianDrive",
    "Hamiltonian2", "Hamiltonian3", "HamiltonianSample3",
    "HermitianTraceless", "IntegrationError", "IntegratorSettings",
    "MatrixInvariantError", "NonFiniteDerivativeError", "OracleTrajectory",
    "PiecewiseDrive", "RunConfig", "StepLimitError", "SumDrive", "Trajectory",
    "UnitaryMatrix", "adjoint", "compare", "config_to_dict",
    "convergence_probe", "delta1", "delta2", "drive_from_spec",
    "exact_constant_unitaries", "frobenius_distance", "frobenius_norm",
    "hermitian_expm",
    "initial_state2", "initial_state3", "integrate", "integrate_schrodinger",
    "log_delta_rates", "multiply", "parse_config", "reconstruct_u2",
    "reconstruct_u3", "rhs2", "rhs3", "schrodinger_residuals",
    "serialize_config", "unitarity_errors",
]
