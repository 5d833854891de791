# %% [markdown]
# # Verification report
#
# Runs every verification suite in quick mode and prints one line per report.
# The same reports are available from the command line with
# `python -m lup.cli verify --quick`.

# %%
from lup.verify import SUITES, run_suites

# %%
reports = run_suites(seed=0, quick=True)
for r in reports:
    print(r.line())

# %% [markdown]
# Summary per suite.

# %%
for name in SUITES:
    reps = SUITES[name](0, 1, None, True)
    worst = max(r.observed_error / r.tolerance for r in reps)
    print(f"{name:13s} reports={len(reps):2d} all_passed={all(r.passed for r in reps)} worst error/tol={worst:.3f}")
