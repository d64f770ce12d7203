"""Driven optomechanical cavity and its Kerr-medium equivalent.

Mean-field branches and stability, Lindblad steady states on a truncated
Fock space, and the optical observables (photon number, g2(0), fidelity,
Wigner function).
"""

from ._core import (
    CSV_HEADER,
    ConfigError,
    DimensionError,
    DimensionlessParams,
    ParameterError,
    PhysicalParams,
    ResourceCapError,
    SteadyStateError,
    bistability_window,
    bose_occupation,
    coherent_state,
    critical_occupation,
    critical_power,
    fidelity,
    from_dimensionless,
    g2_zero,
    mean_field_roots,
    partial_trace_optical,
    photon_number,
    polaron_check,
    region_classify,
    run_sweep,
    solve_branches,
    solve_quantum_point,
    steady_state,
    thermal_state,
    to_dimensionless,
    wigner,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
