"""Conjecture forge: surface data, a statement language, symbolic-regression
search, a bounded linear-arithmetic prover, and two-agent training on top.

Subpackages map one-to-one onto the moving parts:

- ``forge.surfaces``    triangulated closed surfaces, boundary matrices,
  exact integer ranks, datapoints with ground-truth invariants.
- ``forge.statements``  the typed expression language over the eight matrix
  features, canonical forms, concept detection.
- ``forge.regression``  the two-stage genetic search (feature spotters and
  the scaffolder) with the prior-weighted loss.
- ``forge.prover``      premise sets, the provability score, counterexample
  search, theorem-file export.
- ``forge.marl``        the two-agent environment and MADDPG training.
- ``forge.harness``     experiment wiring, metrics, bootstrap statistics,
  ablation reports.
"""

__version__ = "0.1.0"
