"""Planar systems in nilpotent normal form and the analytic branch of Phi = 0."""

from __future__ import annotations

from dataclasses import dataclass, field

from .series import BiPoly, UniSeries, substitute_y

__all__ = ["MalformedSystem", "PlanarSystem", "solve_branch", "branch_residual"]


class MalformedSystem(ValueError):
    """The system is not of the form dx/dt = y + h.o.t., dy/dt = h.o.t."""


@dataclass(frozen=True)
class PlanarSystem:
    """``dx/dt = phi(x, y)``, ``dy/dt = psi(x, y)`` with exact coefficients."""

    phi: BiPoly
    psi: BiPoly
    degree: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "degree", max(self.phi.total_degree, self.psi.total_degree))

    def check_normal_form(self) -> None:
        phi, psi = self.phi, self.psi
        if phi.coeff(0, 0) or psi.coeff(0, 0):
            raise MalformedSystem("the origin is not a critical point")
        if phi.coeff(0, 1) != 1:
            raise MalformedSystem(
                f"coefficient of y in dx/dt must be exactly 1, got {phi.coeff(0, 1)}"
            )
        if phi.coeff(1, 0):
            raise MalformedSystem("dx/dt has a linear x term")
        if psi.coeff(1, 0) or psi.coeff(0, 1):
            raise MalformedSystem("dy/dt has linear terms")

    @property
    def divergence(self) -> BiPoly:
        return self.phi.partial("x") + self.psi.partial("y")

    def is_z2_symmetric(self) -> bool:
        """True when both components are odd under (x, y) -> (-x, -y)."""
        return all((i + j) % 2 == 1 for p in (self.phi, self.psi) for (i, j) in p.terms)

    def float_terms(self):
        """Monomials as ``(i, j, float(c))`` lists for the numerical kernels."""
        return (
            [(i, j, float(c)) for (i, j), c in sorted(self.phi.items())],
            [(i, j, float(c)) for (i, j), c in sorted(self.psi.items())],
        )


def _branch_iterate(phi: BiPoly, K: int) -> UniSeries:
    # y <- y - phi(x, y); phi - y has no y-linear part at the origin, so
    # every pass fixes at least one more coefficient.
    y = UniSeries.zero(K)
    for _ in range(K + 2):
        r = substitute_y(phi, y)
        if r.is_zero():
            return y
        y = y - r
    if not substitute_y(phi, y).is_zero():
        raise RuntimeError("branch iteration failed to converge")  # unreachable for normal form
    return y


def solve_branch(sys: PlanarSystem, K: int) -> UniSeries:
    """The branch y(x), y(0) = 0, on which phi vanishes, through x^K."""
    sys.check_normal_form()
    return _branch_iterate(sys.phi, K)


def branch_residual(sys: PlanarSystem, y: UniSeries) -> UniSeries:
    return substitute_y(sys.phi, y)
