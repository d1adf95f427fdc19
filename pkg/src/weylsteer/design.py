"""Constrained CNOT designs under dc detuning.

Four fixed-amplitude Hamiltonians (``gamma = 1``, ``Omega1 = g``):

* ``SymDcMinus`` / ``SymDcPlus``::

    H = 1/2 [g (s1x -+ s1y) + W2 (s2x -+ s2y) + W3 (s1z - s2z) + g (xx + yy + k zz)]

* ``AsymDcMinus`` / ``AsymDcPlus``::

    H = 1/2 [g (s1x -+ s1y) + W2 (s2x -+ s2y) + g s1z - W4 s2z + g (xx + yy + k zz)]

The unknowns are the gate time ``t`` (units of ``pi / 2g``) and the two free
amplitudes (units of ``g``). They are fixed by landing the gate on the CNOT
class.

At the CNOT class the local invariants are stationary: ``(g1, g2 - 1)`` is
quadratic in the class deviation, so Newton on them converges linearly at
best. The solver instead drives ``m(U)^2 + 1`` to zero, with ``m`` the magic
basis matrix of ``det(U)^{-1/4} U``. This residual is linear in the deviation
and vanishes exactly on the CNOT and SWAP classes. The SWAP class is ruled out
afterwards by checking the invariants.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cartan import CNOT_CLASS, CNOT_INVARIANTS, class_vector_from_unitary, local_invariants, magic_m
from .errors import ConvergenceError
from .qmat import PAULI, expm_hermitian
from .solution import DesignSolution

VARIANTS = ("SymDcMinus", "SymDcPlus", "AsymDcMinus", "AsymDcPlus")
MAX_RABI_RATIO = 1.0
MIN_EFFICIENCY = 2.5
MAX_ANISOTROPY = 0.5

NEWTON_STEP = 1e-6
RESIDUAL_TOL = 1e-10
MAX_ITER = 60
MAX_K_STEP = 0.01

# k = 0 reference solutions (t, W2, W3|W4), used as continuation seeds
SYM_K0_SEED = (1.595776, 0.0, 0.755502)
ASYM_K0_SEED = (1.553771, 0.0, 0.402539)

_IU = np.triu_indices(4)


def _k(a, b):
    return np.kron(PAULI[a], PAULI[b])


@dataclass(frozen=True)
class DesignModel:
    """One of the four dc-detuning design Hamiltonians."""

    variant: str
    g: float = 1.0
    k: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown design variant {self.variant!r}; expected one of {VARIANTS}")
        if not self.g > 0:
            raise ValueError("coupling g must be positive")

    @property
    def symmetric(self):
        return self.variant.startswith("Sym")

    @property
    def sign(self):
        return 1.0 if self.variant.endswith("Plus") else -1.0

    @property
    def names(self):
        return ("omega2", "omega3") if self.symmetric else ("omega2", "omega4")

    def with_k(self, k):
        return DesignModel(self.variant, self.g, k)

    def anisotropy_ok(self):
        return abs(self.k) < MAX_ANISOTROPY


def build_design_hamiltonian(model, params):
    """Hermitian design Hamiltonian for ``params = (W2, W3)`` or ``(W2, W4)`` in units of ``g``."""
    w2, w3 = (float(p) * model.g for p in params)
    g, s = model.g, model.sign
    h = g * (_k("x", "i") + s * _k("y", "i")) + w2 * (_k("i", "x") + s * _k("i", "y"))
    if model.symmetric:
        h = h + w3 * (_k("z", "i") - _k("i", "z"))
    else:
        h = h + g * _k("z", "i") - w3 * _k("i", "z")
    h = h + g * (_k("x", "x") + _k("y", "y") + model.k * _k("z", "z"))
    return h / 2


def design_unitary(model, t_units, params):
    """Gate after ``t_units`` (in ``pi / 2g``) under the design Hamiltonian."""
    return expm_hermitian(build_design_hamiltonian(model, params), t_units * math.pi / (2 * model.g))


def cnot_residual(model, t_seconds, rabi):
    """``(Re g1, Im g1, g2 - 1)`` of the propagated gate; zero only on the CNOT class."""
    u = expm_hermitian(build_design_hamiltonian(model, rabi), t_seconds)
    inv = local_invariants(u)
    return np.array([inv.g1.real, inv.g1.imag, inv.g2 - 1.0])


def _square_residual(model, x):
    u = design_unitary(model, x[0], x[1:])
    u = u / np.linalg.det(u) ** 0.25
    r = magic_m(u)
    r = r @ r + np.eye(4)
    r = r[_IU]
    return np.concatenate([r.real, r.imag])


def _jacobian(model, x, h=NEWTON_STEP):
    cols = []
    for e in np.eye(len(x)):
        cols.append((_square_residual(model, x + h * e) - _square_residual(model, x - h * e)) / (2 * h))
    return np.column_stack(cols)


def _newton(model, x0, tol=RESIDUAL_TOL, max_iter=MAX_ITER):
    # damped Gauss-Newton with Armijo backtracking
    x = np.array(x0, dtype=float)
    r = _square_residual(model, x)
    f = float(r @ r)
    for it in range(max_iter):
        if math.sqrt(f) < tol * 1e-3:
            return x, math.sqrt(f), it
        J = _jacobian(model, x)
        dx = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        while True:
            xn = x + lam * dx
            rn = _square_residual(model, xn)
            fn = float(rn @ rn)
            if fn <= (1 - 1e-4 * lam) * f or lam < 1e-10:
                break
            lam /= 2
        step = float(np.linalg.norm(lam * dx))
        x, r, f_prev, f = xn, rn, f, fn
        if step < 1e-14 * (1 + np.linalg.norm(x)) or (fn >= f_prev and lam < 1e-10):
            break
    return x, math.sqrt(f), it + 1


def efficiency(t_gate, g=1.0):
    """``2 pi / (g t_gate)`` with ``t_gate`` in seconds."""
    if t_gate <= 0:
        raise ValueError("gate time must be positive")
    return 2 * math.pi / (g * t_gate)


def _finish(model, x, sq_res, iters):
    t_units, w2, w3 = (float(v) for v in x)
    u = design_unitary(model, t_units, (w2, w3))
    inv = local_invariants(u)
    cls = class_vector_from_unitary(u)
    residual = max(inv.distance(CNOT_INVARIANTS), max(abs(a - b) for a, b in zip(cls, CNOT_CLASS)))
    eta = efficiency(t_units * math.pi / (2 * model.g), model.g)
    notes = [f"newton iterations: {iters}", f"square residual: {sq_res:.3e}"]
    ok = True
    if max(abs(w2), abs(w3)) > MAX_RABI_RATIO + 1e-12:
        ok = False
        notes.append("Rabi amplitude exceeds g")
    if eta < MIN_EFFICIENCY:
        ok = False
        notes.append(f"efficiency {eta:.4f} below {MIN_EFFICIENCY}")
    if not model.anisotropy_ok():
        ok = False
        notes.append(f"|k| = {abs(model.k):g} outside |k| < {MAX_ANISOTROPY}")
    names = model.names
    return DesignSolution(
        model=model.variant, g=model.g, k=model.k, t_cnot=t_units,
        rabi={names[0]: w2, names[1]: w3}, eta=eta, area=t_units * math.pi / (2 * model.g),
        residual=residual, constraints_ok=ok, notes=notes,
    )


def _guess_vector(model, guess):
    if guess is None:
        return np.array(SYM_K0_SEED if model.symmetric else ASYM_K0_SEED)
    if isinstance(guess, DesignSolution):
        vals = list(guess.rabi.values())
        return np.array([guess.t_cnot, vals[0], vals[1]], dtype=float)
    return np.array(guess, dtype=float)


def solve_design(model, guess=None, tol=RESIDUAL_TOL):
    """Root-find ``(t, W2, W3|W4)`` landing the gate on the CNOT class.

    ``guess`` is a ``DesignSolution``, a ``(t, W2, W3)`` triple, or ``None``
    for the reference ``k = 0`` seed. Constraint violations are reported on
    the returned solution (``constraints_ok``/``notes``), not raised.

    Raises:
        ConvergenceError: the invariant residual stays above ``tol``.
    """
    x0 = _guess_vector(model, guess)
    x, sq_res, iters = _newton(model, x0, tol)
    sol = _finish(model, x, sq_res, iters)
    if not sol.residual < tol:
        raise ConvergenceError(
            f"{model.variant} k={model.k:g}: CNOT residual {sol.residual:.3e} after {iters} iterations",
            best=sol, residual=sol.residual,
        )
    return sol


def continuation_scan(model, k_values, guess=None, max_k_step=MAX_K_STEP):
    """Solve along increasing ``k``; each solution seeds the next.

    Large gaps in ``k`` are bridged with intermediate solves. A failed point
    is reported as ``None`` and the chain restarts from the last good
    solution.
    """
    out = []
    prev = _guess_vector(model, guess)
    k_prev = None
    for k in k_values:
        k = float(k)
        seed = prev
        try:
            if k_prev is not None:
                n_sub = int(math.ceil(abs(k - k_prev) / max_k_step))
                for kk in np.linspace(k_prev, k, n_sub + 1)[1:-1]:
                    sub = solve_design(model.with_k(float(kk)), seed)
                    seed = _guess_vector(model, sub)
            sol = solve_design(model.with_k(k), seed)
        except ConvergenceError:
            out.append(None)
            continue
        out.append(sol)
        prev = _guess_vector(model, sol)
        k_prev = k
    return out
