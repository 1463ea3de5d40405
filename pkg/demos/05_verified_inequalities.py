"""Re-verification of the grid-checked inequalities behind the search.

Every claim is the positivity of an explicit function on a compact box,
evaluated on a dense lattice with a first-derivative Lipschitz pad.  The
same table is available on the command line as `srk verify`.
"""

from srk import inequalities

reports = inequalities.verify_paper_inequalities()
print(f"{'claim':>26} | {'margin':>11} | {'raw min':>11} | "
      f"{'pad':>9} | grid")
print("-" * 76)
for r in reports:
    print(f"{r.claim_id:>26} | {r.margin:+.8f} | {r.raw_min:+.8f} | "
          f"{r.lipschitz_pad:.3e} | {r.grid_points}")
print("\nall positive:", all(r.ok for r in reports))

# the threshold of the separating-route bound sits just below a3 = 1.459
for a3 in (1.40, 1.449, 1.459, 1.469):
    print(f"max Phi(., {a3}) = {inequalities.phi_max_over_a1(a3):.5f}")
