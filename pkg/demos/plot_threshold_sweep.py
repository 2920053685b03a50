"""
Sweeping the grouping thresholds
================================

The spatial and structural gates trade off against each other. Small thresholds
shatter modules into many groups, large ones fuse neighbouring modules. This
script sweeps a few (spatial, edit) pairs over the shipped sweep fixtures and
prints the mean NMI for each.
"""

import numpy as np

from fpga_regroup import GroupingConfig, generate, nmi, run_grouping
from fpga_regroup.synth import fixture_specs

grid = [(30, 10), (50, 5), (80, 5), (100, 3), (120, 8)]
specs = fixture_specs("sweep")

scores = np.zeros((len(specs), len(grid)))
for i, (name, spec) in enumerate(sorted(specs.items())):
    doc, ref = generate(spec)
    truth = ref.labels("module", range(len(doc.cells)))
    for j, (s, e) in enumerate(grid):
        labels = run_grouping(doc, GroupingConfig(s, e), with_words=False).labels
        scores[i, j] = nmi(labels, truth)
    print(f"{name:28s}", " ".join("%.3f" % v for v in scores[i]))

mean = scores.mean(axis=0)
print("mean" + " " * 24, " ".join("%.3f" % v for v in mean))
print("best (spatial, edit):", grid[int(np.argmax(mean))])
