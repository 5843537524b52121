"""Exact finite Fourier analysis on (Z/p^n)^2: transforms, convolution and the units' indicator."""

from padic_hecke.fourier import (TorsionFunction, convolve, extend_by_zero, finite_fourier,
                                 norm_form_units, pointwise)

p = 5
one = TorsionFunction.constant(p, 2, 1, "O", p)
units = extend_by_zero(one, norm_form_units(p, 0, 1))  # units of Z[i] (x) Z_5
table = finite_fourier(units)
print("transform of the units' indicator (Z[i] at 5), by character:")
for e in sorted(table.values)[:6]:
    print(f"  {e}: {table(e)}")
print(f"  ... {len(table.values)} nonzero values")

d = lambda x: TorsionFunction.delta(p, x, "O", p)
print("delta_(1,2) * delta_(3,4) == delta_(4,1):", convolve(d((1, 2)), d((3, 4))) == d((4, 1)))
size = p ** 2
ok = finite_fourier(convolve(units, units)) == pointwise(table, table).scale(size)
print("transform of a convolution is the scaled pointwise product:", ok)
