"""Frozen conventions and tolerances for the numerical lab."""

# Sign applied to the raw lattice field-strength sum. Fixed once so that the
# frame projection of M^1 has Chern number -1 (and the transition phase
# e(-y) has winding -1); do not change without re-freezing the tests.
CHERN_ORIENTATION = -1

# pointwise-algebraic identities
ALGEBRAIC_TOL = 1e-12
# identities that go through per-fiber linear algebra
FIBER_TOL = 1e-8
# maximum |value - round(value)| accepted when extracting an integer
INTEGER_TOL = 1e-3
# probes must see |<m, m>| above this to determine a partial automorphism
PROBE_GRAM_MIN = 1e-10
MIN_PROBES = 3
MIN_GRID = 8
