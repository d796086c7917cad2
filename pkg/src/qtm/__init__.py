"""Exact combinatorial tools for spin/string quasitoric manifolds.

Subpackages cover: simple polytopes as facet-subset complexes
(`qtm.polytope`), characteristic matrices and their equivalences
(`qtm.charmat`), the integral degree-4 cohomology presentation and the
first Pontryagin class (`qtm.cohomology`), spin/string tests and
closed-form coefficient formulas for product families
(`qtm.stringcheck`), decomposition and bundle-structure algorithms
(`qtm.structure`), the mod-2 small cover analogues (`qtm.smallcover`),
and a deterministic enumeration/verification harness (`qtm.harness`).
The `qtm` console script (`qtm.cli`) exposes all of it over JSON.
"""

__version__ = "0.1.0"
