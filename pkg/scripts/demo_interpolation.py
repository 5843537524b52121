"""Both sides of the interpolation identity for Q(i), f = (3), at an inert and a split prime."""

from padic_hecke.hecke_field import IdealRep, ImagQuadField, make_character
from padic_hecke.interpolation import verify_theorem_A

F = ImagQuadField(-4)
f = IdealRep.of(F, 3)
CASES = [
    (7, F.elt(5), 4, []),
    (7, F.elt(5), 3, [((3, 0), 8, 1)]),
    (5, F.elt(7), 4, []),
    (5, F.elt(7), 3, [((2, 1), 4, 1)]),
]

for p, c, alpha, finite in CASES:
    chi = make_character(F, alpha, finite)
    rep = verify_theorem_A(chi, p, f, c, tol=1e-6, dps=30)
    kind = "inert" if p % 4 == 3 else "split"
    print(f"p={p} ({kind}) alpha={alpha} finite={finite or 'trivial'}")
    print(f"  lhs = {rep.lhs}")
    print(f"  rhs = {rep.rhs}")
    print(f"  relative discrepancy {rep.discrepancy:.1e}  {'PASS' if rep.passed else 'FAIL'}")
