"""Walkthrough: the two scaling limits, at demo scale.

The scaled weight walk converges to a drifted Brownian motion, and the
scaled dominant-weight chain to the conditioned space-time process; here
both are run at reduced size (the acceptance suite runs the frozen full
scales).
"""

from affinewalks.harness import (ExperimentConfig, calibrate_chain_harness,
                                 scaling_chain_experiment,
                                 scaling_walk_experiment)


def main():
    walk_cfg = ExperimentConfig(algebra="A1~", spec_n=80, time_grid=(1.0,),
                                samples=4000, seed=101)
    report = scaling_walk_experiment(walk_cfg)
    row = report.per_time[0]
    print("walk vs Gaussian limit (n = 80, 4000 samples):")
    print(f"   mean {row['mean']:.4f} vs {row['target_mean']:.4f} "
          f"(band {row['mean_band']:.4f})")
    print(f"   var  {row['var']:.4f} vs {row['target_var']:.4f}")
    print(f"   KS   {row['ks']:.4f}")

    chain_cfg = ExperimentConfig(algebra="A1~", spec_n=40,
                                 time_grid=(0.5, 1.0), samples=1500,
                                 seed=202, dt=4e-3, start_pairings=("1", "1"))
    cal = calibrate_chain_harness(chain_cfg, n_runs=3)
    print(f"\nharness self-agreement: {cal.notes['pass_fraction']:.0%} "
          f"of {cal.notes['runs']} runs")
    report = scaling_chain_experiment(chain_cfg)
    print("chain vs conditioned diffusion (n = 40, 1500 samples/side):")
    for row in report.per_time:
        print(f"   t={row['t']}: |mean gap| {row['mean_delta']:.4f} "
              f"(band {row['mean_band']:.4f}), KS {row['ks']:.4f} "
              f"(threshold {row['ks_threshold']:.4f}) -> "
              f"{'ok' if row['pass'] else 'off'}")


if __name__ == "__main__":
    main()
