"""
Tighter deadlines, more dropped jobs
====================================

Random 8x4 shops.  For each one the optimum is computed first, then the
deadline is cut to a fraction r of it and a minimal drop set is found.
"""

from jobsetdiag import InstanceDocument, generate_instance
from jobsetdiag.bench import format_table, run_benchmark, summarize

docs = [InstanceDocument(generate_instance(seed, 8, 4), f"gen-{seed}") for seed in range(6)]
records = run_benchmark(docs, (0.95, 0.9, 0.85, 0.8, 0.75), timeout=60)

print(format_table(records))
for row in summarize(records):
    print(f"r={row['r']:<5g} mean drop size {row['mean_diag_size']:.2f}"
          f"   rough guess ceil(jobs*(1-r)) {row['mean_expected_size']:.2f}")
