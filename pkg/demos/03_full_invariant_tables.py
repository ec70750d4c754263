"""The full run: integer invariants of both threefolds up to genus 5,
verified cell-by-cell against the shipped reference tables.

Takes a couple of minutes in exact arithmetic.
"""

import time

from mirrorgv import AnomalySolver, CYModel
from mirrorgv.cli import render_table, table_json, verify_tables
from mirrorgv.refdata import load_reference_json, reference_zero_cells

t0 = time.time()
model = CYModel.builtin()
solver = AnomalySolver(
    model, q_order=26, s_order=20, max_genus=5, max_degree_x=18, max_degree_z=13,
    zero_cells=reference_zero_cells,
)
solver.run()
print(f"solved through genus 5 in {time.time() - t0:.1f}s")
print()

for side_key, side_name in (("x", "X"), ("z", "Xprime")):
    gv = {side_key: solver.gv_table(side_key)}
    table = table_json(gv, side_key)
    print(f"== side {side_name} ==")
    print(render_table(table, "markdown"))
    report = verify_tables(table, load_reference_json(side_name))
    print(
        f"verification: {report['cells_checked']} cells checked, "
        f"{len(report['mismatches'])} mismatches, "
        f"{len(report['uncovered'])} beyond the reference"
    )
    print()

print("k_U^2 =", solver.kappa)
for g in range(2, 6):
    print(f"genus {g}: gap holds = {solver.gap_reports[g]['gaps_zero']}, "
          f"x=3 regular = {all(v == 0 for v in solver.x3_reports[g])}, "
          f"greedy rows added = {solver.systems[g].greedy_added}")
