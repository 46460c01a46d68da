"""fermionlab: exact verification engine for Clifford/Fock operator algebra.

Subpackages by theme: ``clifford`` (rank-r generators on the exterior
algebra), ``ortho`` (semi-orthogonal families, orthogonalization, negative
modes, grading audit), ``maya``/``fock`` (diagram combinatorics and the
Fock space), ``affine`` (normal-ordered bilinears and relation residuals),
``qseries`` (eta/theta/blow-up series and characters), ``schubert``
(partition calculus and Grassmannian duality), ``colimit`` (bounded
bigraded models, trajectories, stabilized colimits), ``cli`` (batch
front end).  Everything computes over arbitrary-precision integers.
"""

__version__ = "0.1.0"
