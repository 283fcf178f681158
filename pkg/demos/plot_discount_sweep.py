"""
Watching u_lambda converge
==========================

Solve the discounted equation on a geometric grid of discounts and measure
the sup distance to the limit.  Writes ``sweep.csv`` and a gnuplot script to
the working directory.
"""

from weakkam.experiments import vanishing_discount_sweep, write_gnuplot_script, write_sweep_csv
from weakkam.model import SATURATING, make_model

# A saturating coupling: no closed form for u_lambda.
model = make_model([[0.0, 1.0, 3.0], [2.0, -0.5, 1.0], [1.0, 2.0, 0.5]],
                   alpha=[0.5, 0.8, 0.3], beta=[0.2, 0.1, 0.4],
                   variant=SATURATING, scale=2.0)

report = vanishing_discount_sweep(model)
for lam, err, it in zip(report.lambdas, report.sup_errors, report.iterations):
    print(f"lambda={lam:.3e}  |u_lambda - u0| = {err:.3e}  steps={it}")
print("converged:", report.converged)

path = write_sweep_csv(report, "sweep.csv")
write_gnuplot_script(path, "sweep.gp")
