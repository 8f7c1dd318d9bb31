"""Every numeric tolerance and frozen experiment parameter in one place.

Code must not carry magic numbers for acceptance decisions: the checks in
:mod:`affinewalks.acceptance`, the test suite, and the CLI all read this
block.  The experiment scales (sample counts, times, specialization index)
were fixed by a calibration run and are version-controlled here.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Golden:
    # multiplicity oracles
    oracle_depth_a1: int = 10
    oracle_depth_a2: int = 6
    oracle_runtime_s: float = 10.0

    # denominator identity
    denominator_depth: int = 20
    denominator_rtol: float = 1e-8
    denominator_spec_ns: tuple[int, ...] = (1, 5, 10)
    denominator_runtime_s: float = 5.0

    # branching vs product decomposition
    branching_depth: int = 8
    branching_powers: tuple[int, ...] = (1, 2)

    # kernel rows
    row_depth: int = 20
    row_mass_tol: float = 1e-6
    row_spec_ns: tuple[int, ...] = (1, 2, 5, 10)

    # discrete reflection principle
    reflection_steps: tuple[int, ...] = (1, 2, 3)
    reflection_rtol: float = 1e-8
    reflection_spec_n: int = 3
    reflection_depth: int = 160
    reflection_min_pairs: int = 5

    # translation covariance of the free kernel
    wonpt_samples: int = 100
    wonpt_rtol: float = 1e-12
    wonpt_radius_alpha1: float = 3.0

    # continuous reflection / Girsanov
    creflect_samples: int = 50
    creflect_rtol: float = 1e-8
    girsanov_rtol: float = 1e-10

    # harmonicity
    harmonic_step: float = 1e-3
    harmonic_rtol: float = 1e-5
    harmonic_points: int = 20
    harmonic_elements: int = 6
    richardson_lo: float = 0.20
    richardson_hi: float = 0.30

    # survival function
    survival_interior_points: int = 50
    survival_boundary_points: int = 10
    survival_exit_horizon: float = 4.0
    survival_exit_dt: float = 1e-3
    survival_exit_paths: int = 10_000
    survival_runtime_s: float = 120.0

    # walk scaling limit
    walk_n: int = 200
    walk_t: float = 1.0
    walk_samples: int = 10_000
    walk_ks_threshold: float = 0.02
    walk_mean_sigmas: float = 3.0

    # chain scaling limit
    chain_n: int = 100
    chain_times: tuple[float, ...] = (0.5, 1.0)
    chain_samples: int = 5_000
    chain_sigmas: float = 3.0
    chain_ks_const: float = 2.0
    chain_dt: float = 2e-3
    chain_runtime_s: float = 600.0
    chain_max_abort_fraction: float = 0.01

    # harness calibration
    calibration_runs: int = 20
    calibration_pass_fraction: float = 0.95


GOLDEN = Golden()
