"""Exact spectral analysis on the Pascal/Sierpinski graph family.

Subpackages:
  graphs      - the substitution-graph hierarchy and coverings
  plane       - the binomial-parity plane model
  exactalg    - integer polynomials, quadratic scalars, exact kernels
  spectra     - characteristic polynomials, eigenspaces, decimation, moments
  julia       - real dynamics of x -> x^2 - x - 3
  transfer    - weighted transfer operators and equilibrium integrals
  compactify  - finite models of the compactified space
  sierpinski  - transport to the edge graph
"""

__version__ = "0.1.0"
