"""Compare the three surrogate strategies on Hartmann6.

Runs the same seeded budget with a full-data GP, a gradient-diversity subset
and a random subset, then prints regret and timing side by side. The subset
strategies cap the GP fitting set at a fixed buffer size so the comparison is
deterministic; drop `fixed_buffer_size` to let the wall-clock policy decide
when to start truncating.
"""

import numpy as np

from gssbo import RunConfig, run, two_phase_split


def main():
    results = {}
    for strategy in ("full", "gssbo", "rssbo"):
        record = run(RunConfig(
            objective="hartmann6", budget=120, n0=20, strategy=strategy,
            fixed_buffer_size=40, seed=7,
        ))
        results[strategy] = record
        last = record.rows[-1]
        pre, post = two_phase_split(record)
        print(f"{strategy:6s}  best={last.best_so_far:8.4f}  "
              f"simple_regret={last.simple_regret:8.4f}  "
              f"cum_regret={last.cum_regret:9.3f}  "
              f"(pre-switch {pre:8.3f} / post {post:8.3f})  "
              f"time={record.total_time_s:6.2f}s  "
              f"switch_at={record.switch_iteration}")

    full_time = results["full"].total_time_s
    print("\nruntime vs full GP:")
    for strategy, record in results.items():
        print(f"  {strategy:6s} {record.total_time_s / full_time:5.2f}x")

    print("\nsubset sizes over the gssbo run (every 10th iteration):")
    for row in results["gssbo"].rows[::10]:
        print(f"  t={row.t:4d}  n_fit={row.subset_size:3d}  phase={row.phase}")


if __name__ == "__main__":
    main()
