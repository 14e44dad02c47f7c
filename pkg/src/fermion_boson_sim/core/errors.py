"""Exception hierarchy shared by every simulator module.

Each class carries the process exit code the command-line driver returns
when the error escapes a subcommand.
"""


class SimulationError(Exception):
    """Base class for simulator failures"""
    exit_code: int = 1


class ConfigurationError(SimulationError, ValueError):
    """Invalid parameter, out-of-range size or aliasing configuration"""
    exit_code = 2


class DimensionError(ConfigurationError):
    """Requested basis or Hilbert-space dimension is not available"""


class UnsupportedOrderError(ConfigurationError):
    """Hermite-Gauss order above the supported maximum"""


class LayoutError(SimulationError, IndexError):
    """Qubit index or register span does not fit the layout"""
    exit_code = 2


class ModelError(SimulationError, ValueError):
    """Malformed Hamiltonian description"""
    exit_code = 2


class PlanError(ModelError):
    """Invalid Trotter plan request"""


class RouteError(SimulationError, ValueError):
    """Term cannot be routed to any circuit synthesizer"""
    exit_code = 2


class OrderingError(RouteError):
    """Fermion orbital pair given in the wrong order"""


class UnsupportedFeatureError(SimulationError):
    """Term kind that is stored but has no circuit realization"""
    exit_code = 2


class NumericError(SimulationError, ArithmeticError):
    """Eigensolver failure, overflow or loss of unitarity"""
    exit_code = 3
