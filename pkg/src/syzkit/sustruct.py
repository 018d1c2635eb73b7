"""SU(n) structures and the two supersymmetry systems.

An SU(n) structure is a nondegenerate (1,1)-form together with a decomposable
complex volume form; the conformal factor relates their top wedges.  The
complex-side system asks for a closed volume form and a balanced metric; the
symplectic-side system asks for a closed symplectic form plus closedness of
two polarized projections of the volume form.  Flux currents measure the
failure of the Calabi-Yau equations on each side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .calculus import (
    BasisChangeError,
    ComplexBasis,
    MissingPairing,
    SymplecticData,
    d_lambda,
    dolbeault,
    exterior_d,
)
from .coeffring import (
    GaussianRational,
    I,
    ONE,
    Poly,
    PolyRatio,
    P_ONE,
    ZERO,
    exponent_vectors,
)
from .exterior import Form, FrameSpec, GenClass, bits
from .fourier import SemiflatPair
from .reports import FAIL, PASS, UNDETERMINED, CheckReport

QUARTER_UNITS = (GaussianRational(1), I, GaussianRational(-1), -I)


@dataclass
class Polarization:
    fiber_class: GenClass
    phase_quarter: Optional[int] = None  # e^{i theta} = i^phase_quarter


@dataclass
class FluxCurrent:
    form: Form
    side: str  # "IIA" | "IIB"


class SUStructure:
    """A pair (omega, Omega) with optional polarization / complex-basis data.

    `Omega_factors`, when present, is the decomposition of Omega into complex
    one-forms (times `prefactor`); the induced complex basis is built from it
    when the transition is exactly invertible.
    """

    def __init__(
        self,
        n: int,
        frame: FrameSpec,
        omega: Form,
        Omega: Optional[Form] = None,
        Omega_factors: Optional[Sequence[Form]] = None,
        prefactor: GaussianRational = ONE,
        polarization: Optional[Polarization] = None,
        complex_basis: Optional[ComplexBasis] = None,
        mu: Optional[list[list[Poly]]] = None,
    ):
        if Omega is None and Omega_factors is None:
            raise ValueError("need Omega or its factors")
        self.n = n
        self.frame = frame
        self.omega = omega
        self.Omega_factors = list(Omega_factors) if Omega_factors is not None else None
        if Omega is None:
            Omega = Form.scalar(frame, prefactor)
            for f in self.Omega_factors:
                Omega = Omega.wedge(f)
        self.Omega = Omega
        self.prefactor = prefactor
        self.polarization = polarization
        self.complex_basis = complex_basis
        self.mu = mu
        self._conformal: Optional[ConformalFactor] = None

    def conformal_factor(self) -> "ConformalFactor":
        if self._conformal is None:
            self._conformal = conformal_factor(self)
        return self._conformal

    def pq_project(self, p: int, q: int) -> Form:
        if self.polarization is None:
            raise ValueError("no polarization set")
        return self.Omega.bidegree_project(p, q, (self.polarization.fiber_class, GenClass.BASE))

    def to_json(self):
        pol = None
        if self.polarization is not None:
            pol = {
                "fiber_class": self.polarization.fiber_class.value,
                "phase_quarter": self.polarization.phase_quarter,
            }
        out = {
            "n": self.n,
            "frame": {
                "labels": [g.label for g in self.frame.generators],
                "classes": [g.gclass.value for g in self.frame.generators],
                "paired": [g.paired_base_var for g in self.frame.generators],
                "base_vars": list(self.frame.base_vars),
            },
            "omega": self.omega.to_json(),
            "polarization": pol,
        }
        if self.Omega_factors is not None:
            out["Omega_factors"] = [f.to_json() for f in self.Omega_factors]
            out["prefactor"] = self.prefactor.to_json()
        else:
            out["Omega"] = self.Omega.to_json()
        return out

    @staticmethod
    def from_json(obj) -> "SUStructure":
        from .exterior import Generator

        fr = obj["frame"]
        gens = []
        for lab, cls, paired in zip(fr["labels"], fr["classes"], fr["paired"]):
            gens.append(Generator(lab, GenClass(cls), paired_base_var=paired))
        frame = FrameSpec(gens, fr["base_vars"], obj["n"])
        omega = Form.from_json(obj["omega"], frame)
        pol = None
        if obj.get("polarization"):
            pol = Polarization(
                GenClass(obj["polarization"]["fiber_class"]),
                obj["polarization"].get("phase_quarter"),
            )
        factors = None
        Omega = None
        pref = ONE
        basis = None
        if "Omega_factors" in obj:
            factors = [Form.from_json(f, frame) for f in obj["Omega_factors"]]
            pref = GaussianRational.from_json(obj["prefactor"])
            try:
                basis = ComplexBasis(
                    frame, [(f"dz{k+1}", f) for k, f in enumerate(factors)]
                )
            except BasisChangeError:
                basis = None
        else:
            Omega = Form.from_json(obj["Omega"], frame)
        return SUStructure(
            obj["n"],
            frame,
            omega,
            Omega=Omega,
            Omega_factors=factors,
            prefactor=pref,
            polarization=pol,
            complex_basis=basis,
        )


@dataclass
class ConformalFactor:
    ratio: PolyRatio

    @property
    def is_constant(self) -> bool:
        return self.ratio.is_constant()

    @property
    def constant_value(self) -> GaussianRational:
        return self.ratio.constant_value()

    def __str__(self):
        return str(self.ratio)


def _top_coefficient(frame: FrameSpec, form: Form) -> Poly:
    top = (1 << len(frame)) - 1
    for mask, c in form.terms.items():
        if mask != top:
            raise ValueError("form is not a top form")
    return form.terms.get(top, Poly())


def conformal_factor(s: SUStructure) -> ConformalFactor:
    """Solve Omega ^ conj(Omega) = i^n F omega^n / n! for F, exactly.

    The i^n normalization is fixed once and for all; variant conventions
    differing by an overall sign are NOT silently applied, so F may
    legitimately come out negative (it does on the flat examples).  Reports
    carry the exact value instead of forcing positivity.
    """
    if len(s.frame) != 2 * s.n:
        raise ValueError("frame must have exactly 2n one-form generators")
    oo = s.Omega.wedge(s.Omega.conjugate())
    wn = s.omega
    fact = 1
    for k in range(2, s.n + 1):
        wn = wn.wedge(s.omega)
        fact *= k
    wn = wn * Fraction(1, fact)
    den = _top_coefficient(s.frame, wn)
    if den.is_zero():
        raise ValueError("omega is degenerate: omega^n = 0")
    num = _top_coefficient(s.frame, oo)
    i_n = ONE
    for _ in range(s.n):
        i_n = i_n * I
    return ConformalFactor(PolyRatio(num, den * i_n))


def proportional_to(form: Form, candidate: Form) -> Optional[GaussianRational]:
    """The exact constant c with form == c * candidate, or None."""
    if candidate.is_zero():
        return ZERO if form.is_zero() else None
    if form.is_zero():
        return ZERO
    mask, cc = next(iter(sorted(candidate.terms.items())))
    fc = form.terms.get(mask)
    if fc is None:
        return None
    try:
        c = PolyRatio(fc, cc).constant_value()
    except ValueError:
        return None
    if form == candidate * Poly.constant(c):
        return c
    return None


def check_su(s: SUStructure) -> CheckReport:
    """The defining compatibilities of an SU(n) structure."""
    rep = CheckReport("su-structure")
    ow = s.Omega.wedge(s.omega)
    rep.add("Omega-wedge-omega-vanishes", ow.is_zero(), ow)
    try:
        cf = s.conformal_factor()
    except ValueError as e:
        rep.add("conformal-factor-defined", False, e)
        return rep
    rep.add("conformal-factor-defined", True)
    if cf.is_constant:
        v = cf.constant_value
        rep.add("conformal-factor-nonvanishing", bool(v), cf.ratio)
        rep.add_status("conformal-factor-constant", PASS, str(v))
    else:
        rep.add_status("conformal-factor-nonvanishing", UNDETERMINED, cf.ratio)
    return rep


def check_iib(s: SUStructure) -> CheckReport:
    """Closed volume form + balanced metric, each exactly."""
    rep = CheckReport("iib-system")
    rep.extend(check_su(s))
    dO = exterior_d(s.Omega)
    rep.add("d-Omega-vanishes", dO.is_zero(), dO)
    wk = Form.scalar(s.frame, 1)
    for _ in range(s.n - 1):
        wk = wk.wedge(s.omega)
    dw = exterior_d(wk)
    rep.add("d-omega-power-n-minus-1-vanishes", dw.is_zero(), dw)
    return rep


def check_iia(s: SUStructure) -> CheckReport:
    """Symplectic form + closedness of the (n,0) and (1,n-1) projections."""
    if s.polarization is None:
        raise ValueError("IIA check needs a polarization")
    rep = CheckReport("iia-system")
    rep.extend(check_su(s))
    dw = exterior_d(s.omega)
    rep.add("d-omega-vanishes", dw.is_zero(), dw)
    top = s.pq_project(s.n, 0)
    d_top = exterior_d(top)
    rep.add("d-pi-n0-Omega-vanishes", d_top.is_zero(), d_top)
    mid = s.pq_project(1, s.n - 1)
    d_mid = exterior_d(mid)
    rep.add("d-pi-1-nminus1-Omega-vanishes", d_mid.is_zero(), d_mid)
    _check_special_phase(rep, s, top)
    return rep


def _check_special_phase(rep: CheckReport, s: SUStructure, pure_fiber: Form) -> None:
    """The pure-fiber component must be a positive real multiple of e^{i theta}."""
    coeffs = list(pure_fiber.terms.values())
    if len(coeffs) != 1:
        rep.add("special-phase", False, "pure-fiber component is not a single monomial")
        return
    c = coeffs[0]
    if not c.is_constant():
        rep.add_status("special-phase", UNDETERMINED, f"non-constant coefficient {c}")
        return
    v = c.constant_value()
    computed = None
    for q, unit in enumerate(QUARTER_UNITS):
        w = v / unit
        if w.im == 0 and w.re > 0:
            computed = q
            break
    if computed is None:
        rep.add("special-phase", False, f"coefficient {v} has no quarter-turn phase")
        return
    declared = s.polarization.phase_quarter
    if declared is None:
        rep.add_status("special-phase", PASS, f"computed phase quarter {computed}")
    else:
        rep.add("special-phase", declared == computed,
                f"declared {declared}, computed {computed}")


def _scale_by_inverse_conformal(s: SUStructure, form: Form) -> Form:
    cf = s.conformal_factor()
    if cf.is_constant:
        v = cf.constant_value
        if not v:
            raise ValueError("conformal factor vanishes")
        return form * (ONE / v)
    num, den = cf.ratio.num, cf.ratio.den
    if num.is_constant():
        return form * (den * (ONE / num.constant_value()))
    raise ValueError("non-constant conformal factor without exact inverse")


def flux_iib(s: SUStructure, candidate: Optional[Form] = None) -> tuple[FluxCurrent, CheckReport]:
    """2i del dbar (F^{-1} omega), with an optional proportionality witness."""
    if s.complex_basis is None:
        raise ValueError("IIB flux needs the complex basis")
    rep = CheckReport("flux-iib")
    arg = _scale_by_inverse_conformal(s, s.omega)
    _, dbar = dolbeault(arg, s.complex_basis)
    ddbar, rest = dolbeault(dbar, s.complex_basis)
    rho = s.complex_basis.from_complex(ddbar) * (I * 2)
    flux = FluxCurrent(rho, "IIB")
    d_rho = exterior_d(rho)
    rep.add("flux-closed", d_rho.is_zero(), d_rho)
    if candidate is not None:
        c = proportional_to(rho, candidate)
        rep.add("flux-proportional-to-candidate", c is not None, rho)
        if c is not None:
            rep.add_status("flux-proportionality-constant", PASS, str(c))
    return flux, rep


def flux_iia(s: SUStructure, candidate: Optional[Form] = None) -> tuple[FluxCurrent, CheckReport]:
    """-i d d^Lambda (F (pi^{n-1,1} Omega + pi^{0,n} Omega)) for Darboux omega."""
    if s.polarization is None:
        raise ValueError("IIA flux needs a polarization")
    symp = SymplecticData.darboux(s.frame, s.polarization.fiber_class)
    if symp.omega != s.omega:
        raise MissingPairing("IIA flux requires the canonical Darboux omega")
    rep = CheckReport("flux-iia")
    cf = s.conformal_factor()
    part = s.pq_project(s.n - 1, 1) + s.pq_project(0, s.n)
    if cf.is_constant:
        arg = part * cf.constant_value
    elif cf.ratio.den.is_constant():
        arg = part * (cf.ratio.num * (ONE / cf.ratio.den.constant_value()))
    else:
        raise ValueError("conformal factor is not exactly representable")
    rho = exterior_d(d_lambda(arg, symp)) * (-I)
    flux = FluxCurrent(rho, "IIA")
    d_rho = exterior_d(rho)
    rep.add("flux-closed", d_rho.is_zero(), d_rho)
    if candidate is not None:
        c = proportional_to(rho, candidate)
        rep.add("flux-proportional-to-candidate", c is not None, rho)
        if c is not None:
            rep.add_status("flux-proportionality-constant", PASS, str(c))
    return flux, rep


def mirror_transform(pair: SemiflatPair, omega_check: Form) -> SUStructure:
    """Build the symplectic-side structure whose volume form is the transform
    of exp(2 * omega_check).

    The volume form is returned factored: prefactor (-1)^{n(n-1)/2} times the
    product of (dth_i + i mu_i) with mu_i the i-th row of the coefficient
    matrix of omega_check.
    """
    n = pair.n
    if omega_check.frame == pair.holo_frame:
        omega_check = pair.basis_xc.from_complex(omega_check)
    if omega_check.frame != pair.frame_xc:
        raise ValueError("omega_check must live on the complex side of the pair")
    if omega_check.conjugate() != omega_check:
        raise ValueError("omega_check must be real")
    fibers = pair.frame_xc.gens_of_class(GenClass.FIBER_MIRROR)
    bases = pair.frame_xc.gens_of_class(GenClass.BASE)
    allowed = set()
    mu = [[Poly() for _ in range(n)] for _ in range(n)]
    for a, fa in enumerate(fibers):
        for b, db in enumerate(bases):
            allowed.add((1 << fa) | (1 << db))
    for mask, c in omega_check.terms.items():
        if mask not in allowed:
            raise ValueError("omega_check must pair one fiber leg with one base leg")
        i_f, i_b = sorted(bits(mask))
        mu[fibers.index(i_f)][bases.index(i_b)] = c
    for a in range(n):
        for b in range(a + 1, n):
            if mu[a][b] != mu[b][a]:
                raise ValueError("coefficient matrix is not symmetric")
    det = linalg.poly_det(mu)
    if det.is_zero():
        raise ValueError("degenerate coefficient matrix: the one-forms are dependent")

    factors = []
    for a in range(n):
        f = Form.gen(pair.frame_x, pair.fiber_x_labels[a])
        for b in range(n):
            if not mu[a][b].is_zero():
                f = f + Form.gen(pair.frame_x, f"d{pair.base_vars[b]}") * (mu[a][b] * I)
        factors.append(f)
    pref = ONE if (n * (n - 1) // 2) % 2 == 0 else -ONE

    basis = None
    try:
        basis = ComplexBasis(pair.frame_x, [(f"dw{k+1}", factors[k]) for k in range(n)])
    except BasisChangeError:
        basis = None

    omega = SymplecticData.darboux(pair.frame_x, GenClass.FIBER_X).omega
    phase = 0 if pref == ONE else 2
    return SUStructure(
        n,
        pair.frame_x,
        omega,
        Omega_factors=factors,
        prefactor=pref,
        polarization=Polarization(GenClass.FIBER_X, phase),
        complex_basis=basis,
        mu=mu,
    )


def _extract_mu(s: SUStructure) -> list[list[Poly]]:
    if s.mu is not None:
        return s.mu
    fibers = [i for i, g in enumerate(s.frame.generators)
              if g.leg_class in (GenClass.FIBER_X, GenClass.FIBER_MIRROR)]
    bases = s.frame.gens_of_class(GenClass.BASE)
    n = len(fibers)
    mu = [[Poly() for _ in range(n)] for _ in range(n)]
    for mask, c in s.omega.terms.items():
        idx = sorted(bits(mask))
        if len(idx) != 2 or idx[0] not in fibers or idx[1] not in bases:
            raise ValueError("omega does not pair fiber legs with base legs")
        mu[fibers.index(idx[0])][bases.index(idx[1])] = c
    return mu


def default_sample_points(base_vars: Sequence[str]) -> list[dict]:
    pts = [{v: Fraction(0) for v in base_vars}]
    for v in base_vars:
        p = {w: Fraction(0) for w in base_vars}
        p[v] = Fraction(1)
        pts.append(p)
    return pts


def check_hermitian_at(s: SUStructure, points: Optional[Sequence[dict]] = None) -> CheckReport:
    """Positive definiteness of the coefficient matrix at rational points,
    by exact leading principal minors."""
    rep = CheckReport("hermitian-at-points")
    mu = _extract_mu(s)
    n = len(mu)
    if points is None:
        points = default_sample_points(s.frame.base_vars)
    for pt in points:
        tag = ",".join(f"{v}={pt[v]}" for v in s.frame.base_vars)
        ok = True
        witness = None
        for k in range(1, n + 1):
            sub = [[Poly.constant(mu[i][j].evaluate(pt)) for j in range(k)] for i in range(k)]
            det = linalg.poly_det(sub).constant_value()
            if det.im != 0 or det.re <= 0:
                ok = False
                witness = f"minor {k} = {det} at ({tag})"
                break
        rep.add(f"positive-definite@({tag})", ok, witness)
    return rep


def check_deformation_class(
    s: SUStructure,
    delta: Form,
    side: str,
    degree_bound: Optional[int] = None,
) -> CheckReport:
    """Class membership for an infinitesimal deformation.

    IIB: delta must be closed and equal omega^{n-2} ^ beta with beta a
    primitive (1,1)-form (exact linear solve for beta).  IIA: the (1,n-1)
    projection must be closed, delta must be d^Lambda-closed and primitive.
    """
    rep = CheckReport(f"deformation-{side.lower()}")
    n = s.n
    if side.upper() == "IIB":
        if n < 2:
            raise ValueError("IIB deformation classes need n >= 2")
        if delta.degrees() not in ({2 * n - 2}, set()):
            raise ValueError(f"IIB deformation must have degree {2*n - 2}")
        dd = exterior_d(delta)
        rep.add("deformation-closed", dd.is_zero(), dd)
        if s.complex_basis is None:
            rep.add_status("lefschetz-primitive-decomposition", UNDETERMINED,
                           "no complex basis available")
            return rep
        wk = Form.scalar(s.frame, 1)
        for _ in range(n - 2):
            wk = wk.wedge(s.omega)
        wk1 = wk.wedge(s.omega)
        if degree_bound is None:
            degree_bound = max((p.degree() for p in delta.terms.values()), default=0)
            degree_bound = max(degree_bound, 0)
        beta = _solve_primitive_11(s, delta, wk, wk1, degree_bound)
        rep.add("lefschetz-primitive-decomposition", beta is not None,
                f"no primitive (1,1) beta with omega^{n-2}^beta = delta "
                f"(coefficient degree <= {degree_bound})")
        if beta is not None:
            rep.add_status("primitive-witness", PASS, str(beta))
    elif side.upper() == "IIA":
        if delta.degrees() not in ({n}, set()):
            raise ValueError(f"IIA deformation must have degree {n}")
        if s.polarization is None:
            raise ValueError("IIA deformation check needs a polarization")
        proj = delta.bidegree_project(1, n - 1, (s.polarization.fiber_class, GenClass.BASE))
        dp = exterior_d(proj)
        rep.add("projected-deformation-closed", dp.is_zero(), dp)
        symp = SymplecticData.darboux(s.frame, s.polarization.fiber_class)
        dl = d_lambda(delta, symp)
        rep.add("deformation-dlambda-closed", dl.is_zero(), dl)
        wd = s.omega.wedge(delta)
        rep.add("deformation-primitive", wd.is_zero(), wd)
    else:
        raise ValueError(f"unknown side {side!r}")
    return rep


def _solve_primitive_11(
    s: SUStructure, delta: Form, wk: Form, wk1: Form, degree_bound: int
) -> Optional[Form]:
    basis = s.complex_basis
    hf = basis.holo_frame
    monos = []
    hm = hf.class_mask(GenClass.FIBER_MIRROR)
    am = hf.class_mask(GenClass.BASE)
    for mask in range(1 << len(hf)):
        if (mask & hm).bit_count() == 1 and (mask & am).bit_count() == 1 and mask & ~(hm | am) == 0:
            monos.append(mask)
    uvars = tuple(sorted(s.frame.base_vars))
    exps = exponent_vectors(len(uvars), degree_bound)
    unknowns = [(m, e) for m in monos for e in exps]

    delta_c = basis.to_complex(delta)
    wk_c = basis.to_complex(wk)
    wk1_c = basis.to_complex(wk1)

    rows_index: dict[tuple, int] = {}
    rhs_entries: dict[int, GaussianRational] = {}

    def key_of(mask, exp, eq):
        k = (eq, mask, exp)
        if k not in rows_index:
            rows_index[k] = len(rows_index)
        return rows_index[k]

    def entries_of(form: Form, eq: int, into: dict[int, GaussianRational]):
        for mask, c in form.terms.items():
            cu = c.in_universe(uvars) if c.vars != uvars else c
            for exp, v in cu.terms.items():
                into[key_of(mask, exp, eq)] = v

    entries_of(delta_c, 0, rhs_entries)

    col_vecs = []
    for m, e in unknowns:
        gen_form = Form(hf, {m: Poly(uvars, {tuple(e): ONE})})
        entries: dict[int, GaussianRational] = {}
        entries_of(wk_c.wedge(gen_form), 0, entries)
        entries_of(wk1_c.wedge(gen_form), 1, entries)
        col_vecs.append(entries)

    nrows = len(rows_index)
    mat = [[ZERO] * len(unknowns) for _ in range(nrows)]
    for j, entries in enumerate(col_vecs):
        for i, v in entries.items():
            mat[i][j] = v
    b = [ZERO] * nrows
    for i, v in rhs_entries.items():
        b[i] = v
    sol = linalg.solve(mat, b)
    if sol is None:
        return None
    beta = Form.zero(hf)
    for (m, e), x in zip(unknowns, sol):
        if x:
            beta = beta + Form(hf, {m: Poly(uvars, {tuple(e): x})})
    return basis.from_complex(beta)
