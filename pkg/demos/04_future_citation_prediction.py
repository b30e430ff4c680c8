"""Venue z scores: does a measure taken early predict later citation gains?

Each venue's papers are ranked by NID and by citation count five years
after publication; the Kendall distance of each ranking from the ranking
by fractional citation gain over years five to ten is that venue's z
score.  On the planted benchmark every paper has the same early citation
count, but papers with well-balanced trees receive the larger bursts, so
the tree-aware ranking wins by construction.
"""

from idtree.experiments import z_experiment
from idtree.synth import make_z_benchmark

corpus = make_z_benchmark(seed=0)
print(f"benchmark corpus: {len(corpus)} papers, {corpus.n_edges} edges")

report = z_experiment(corpus, year_range=(1995, 2000), t1=5, t2=10)
print(f"\n{'venue':<12} {'year':>4} {'papers':>6} {'z_nid':>8} {'z_cite':>8} {'diff':>8}")
for v in report.venues:
    print(f"{v.venue:<12} {v.year:>4} {len(v.paper_ids):>6} "
          f"{v.z_nid:>8.4f} {v.z_cite:>8.4f} {v.z_diff:>8.4f}")

print(f"\nmean z using NID:       {report.mean_z_nid:.4f}")
print(f"mean z using citations: {report.mean_z_cite:.4f}")
print("lower is better; the NID ranking anticipates the planted bursts exactly,")
print("while the citation ranking has nothing to go on (all counts are equal).")
