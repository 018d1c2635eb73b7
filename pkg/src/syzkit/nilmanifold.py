"""Upper-unitriangular nilmanifold family: frames, both supersymmetry sides,
lattice-invariance certificates, and the mirror pipeline.

For size K the base has coordinates r_ij (i < j, dictionary order, n =
K(K-1)/2 of them).  The tangent-bundle side carries the complex structure
(fiber coordinates th_ij, engine class FIBER_MIRROR, since it is the side
that gets dualized); the cotangent-bundle side carries the canonical
symplectic form (fiber coordinates thc_ij, engine class FIBER_X).  The
lattice acts by affine maps whose coefficients are the symbols a_ij; frame
invariance is checked as a polynomial identity in both r and a.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .calculus import exterior_d
from .coeffring import GaussianRational, I, ONE, Poly, P_ONE
from .exterior import (
    Form,
    FrameSpec,
    GenClass,
    Generator,
    bits,
    frame_collect,
    frame_expand,
    substitute_generators,
)
from .fourier import SemiflatPair
from .reports import PASS, CheckReport
from .sustruct import (
    Polarization,
    SUStructure,
    check_iia,
    check_iib,
    flux_iia,
    flux_iib,
    mirror_transform,
    proportional_to,
)
from .calculus import ComplexBasis


DEFAULT_MAX_K = 5


def _max_k() -> int:
    return int(os.environ.get("SYZKIT_MAX_K", DEFAULT_MAX_K))


@dataclass
class NilData:
    K: int
    n: int
    pairs: list[tuple[int, int]]
    base_vars: list[str]
    x_coord: FrameSpec         # complex side TB/L: dth + dr
    xc_coord: FrameSpec        # symplectic side T*B/L*: dthc + dr
    x_frame: FrameSpec         # f, e frame generators with structure equations
    xc_frame: FrameSpec        # fc, e frame generators with structure equations
    e_forms: dict[tuple[int, int], Form]
    f_forms: dict[tuple[int, int], Form]
    fc_forms: dict[tuple[int, int], Form]
    gamma_var_subst: dict[str, Poly]
    gamma_x_images: dict[int, Form]

    def pair_label(self, p: tuple[int, int], prefix: str) -> str:
        return f"{prefix}{p[0]}{p[1]}"


def build(K: int) -> NilData:
    """Construct all frames and the lattice action for matrix size K."""
    if K < 2:
        raise ValueError("matrix size must be at least 2")
    cap = _max_k()
    if K > cap:
        raise ValueError(
            f"K={K} exceeds the configured cap {cap} (set SYZKIT_MAX_K to raise it); "
            f"the 2n-generator algebra grows as 4^n with n = K(K-1)/2"
        )
    if K >= 5:
        warnings.warn(
            f"K={K} gives n={K*(K-1)//2}; expanding omega^(n-1) is expensive",
            RuntimeWarning,
            stacklevel=2,
        )
    pairs = [(i, j) for i in range(1, K + 1) for j in range(i + 1, K + 1)]
    pairs.sort()
    n = len(pairs)
    rv = [f"r{i}{j}" for i, j in pairs]

    def gens(fiber_prefix: str, fiber_class: GenClass):
        out = [Generator(f"{fiber_prefix}{i}{j}", fiber_class) for i, j in pairs]
        out += [Generator(f"dr{i}{j}", GenClass.BASE, paired_base_var=f"r{i}{j}") for i, j in pairs]
        return out

    x_coord = FrameSpec(gens("dth", GenClass.FIBER_MIRROR), rv, n)
    xc_coord = FrameSpec(gens("dthc", GenClass.FIBER_X), rv, n)

    # e_{ik} = dr_{ik} - sum_{i<j<k} r_{ij} e_{jk}; f same over dth;
    # fc_{jk} = dthc_{jk} + sum_{i<j} r_{ij} fc_{ik}
    e_forms: dict[tuple[int, int], Form] = {}
    f_forms: dict[tuple[int, int], Form] = {}
    for gap in range(1, K):
        for i, k in pairs:
            if k - i != gap:
                continue
            e = Form.gen(x_coord, f"dr{i}{k}")
            f = Form.gen(x_coord, f"dth{i}{k}")
            for j in range(i + 1, k):
                rij = Poly.variable(f"r{i}{j}")
                e = e - e_forms[(j, k)] * rij
                f = f - f_forms[(j, k)] * rij
            e_forms[(i, k)] = e
            f_forms[(i, k)] = f
    # the tangent-side recursion linearizes to dth_{ik} = f_{ik} + sum_j r_{ij} f_{jk},
    # so the dual coframe has the one-step closed form below (nesting the dual
    # forms instead of the coordinate forms breaks duality once K >= 4)
    fc_forms: dict[tuple[int, int], Form] = {}
    for j, k in pairs:
        fc = Form.gen(xc_coord, f"dthc{j}{k}")
        for i in range(1, j):
            fc = fc + Form.gen(xc_coord, f"dthc{i}{k}") * Poly.variable(f"r{i}{j}")
        fc_forms[(j, k)] = fc

    x_frame = FrameSpec(
        [Generator(f"f{i}{j}", GenClass.FRAME, f_forms[(i, j)]) for i, j in pairs]
        + [Generator(f"e{i}{j}", GenClass.FRAME, e_forms[(i, j)]) for i, j in pairs],
        rv,
        n,
    )
    xc_frame = FrameSpec(
        [Generator(f"fc{i}{j}", GenClass.FRAME, fc_forms[(i, j)]) for i, j in pairs]
        + [Generator(f"e{i}{j}", GenClass.FRAME, e_forms[(i, j)].transport(xc_coord)) for i, j in pairs],
        rv,
        n,
    )

    # structure equations: de_{ij} = -sum e_{ik}^e_{kj}, df_{ij} = -sum e_{ik}^f_{kj};
    # dfc is collected from the coordinate computation (it may have r-dependent
    # coefficients for K >= 4)
    for i, j in pairs:
        de = Form.zero(x_frame)
        df = Form.zero(x_frame)
        for k in range(i + 1, j):
            de = de - Form.gen(x_frame, f"e{i}{k}").wedge(Form.gen(x_frame, f"e{k}{j}"))
            df = df - Form.gen(x_frame, f"e{i}{k}").wedge(Form.gen(x_frame, f"f{k}{j}"))
        x_frame._set_structure(f"e{i}{j}", de)
        x_frame._set_structure(f"f{i}{j}", df)
    for v, p in zip(rv, pairs):
        i, j = p
        dr_in_frame = frame_collect(Form.gen(x_coord, f"dr{i}{j}"), x_frame)
        x_frame._set_base_one_form(v, dr_in_frame)
    for i, j in pairs:
        de = Form.zero(xc_frame)
        for k in range(i + 1, j):
            de = de - Form.gen(xc_frame, f"e{i}{k}").wedge(Form.gen(xc_frame, f"e{k}{j}"))
        xc_frame._set_structure(f"e{i}{j}", de)
    for v, p in zip(rv, pairs):
        i, j = p
        xc_frame._set_base_one_form(v, frame_collect(Form.gen(xc_coord, f"dr{i}{j}"), xc_frame))
    for i, j in pairs:
        d_coord = exterior_d(fc_forms[(i, j)])
        xc_frame._set_structure(f"fc{i}{j}", frame_collect(d_coord, xc_frame))

    # lattice action r'_{ik} = r_{ik} + sum_{i<j<k} a_{ij} r_{jk} + a_{ik},
    # th'_{ik} = th_{ik} + sum a_{ij} th_{jk}
    var_subst: dict[str, Poly] = {}
    x_images: dict[int, Form] = {}
    for i, k in pairs:
        img = Poly.variable(f"r{i}{k}") + Poly.variable(f"a{i}{k}")
        dr_img = Form.gen(x_coord, f"dr{i}{k}")
        dth_img = Form.gen(x_coord, f"dth{i}{k}")
        for j in range(i + 1, k):
            a = Poly.variable(f"a{i}{j}")
            img = img + a * Poly.variable(f"r{j}{k}")
            dr_img = dr_img + Form.gen(x_coord, f"dr{j}{k}") * a
            dth_img = dth_img + Form.gen(x_coord, f"dth{j}{k}") * a
        var_subst[f"r{i}{k}"] = img
        x_images[x_coord.index[f"dr{i}{k}"]] = dr_img
        x_images[x_coord.index[f"dth{i}{k}"]] = dth_img

    return NilData(
        K=K,
        n=n,
        pairs=pairs,
        base_vars=rv,
        x_coord=x_coord,
        xc_coord=xc_coord,
        x_frame=x_frame,
        xc_frame=xc_frame,
        e_forms=e_forms,
        f_forms=f_forms,
        fc_forms=fc_forms,
        gamma_var_subst=var_subst,
        gamma_x_images=x_images,
    )


def gamma_pullback(nd: NilData, form: Form) -> Form:
    """Pull a coordinate form on the complex side back along the symbolic
    lattice action (coefficients and differentials both move)."""
    return substitute_generators(
        form,
        nd.x_coord,
        nd.gamma_x_images,
        coeff_map=lambda p: p.subst(nd.gamma_var_subst),
    )


def check_gamma_invariance(nd: NilData) -> CheckReport:
    """Every frame one-form equals its own pullback, identically in r and a."""
    rep = CheckReport("gamma-invariance", config={"K": nd.K})
    for i, j in nd.pairs:
        for name, form in ((f"e{i}{j}", nd.e_forms[(i, j)]), (f"f{i}{j}", nd.f_forms[(i, j)])):
            diff = gamma_pullback(nd, form) - form
            rep.add(f"invariant-{name}", diff.is_zero(), diff)
    return rep


def structure_equations(nd: NilData) -> CheckReport:
    """Differentiate the coordinate expansions and compare with the stored
    frame structure equations."""
    rep = CheckReport("structure-equations", config={"K": nd.K})
    for i, j in nd.pairs:
        for name, coord, frame in (
            (f"e{i}{j}", nd.e_forms[(i, j)], nd.x_frame),
            (f"f{i}{j}", nd.f_forms[(i, j)], nd.x_frame),
        ):
            claimed = frame.d_of_generator(frame.index[name])
            got = exterior_d(coord)
            want = frame_expand(claimed, nd.x_coord)
            rep.add(f"d-{name}", got == want, got - want)
        name = f"fc{i}{j}"
        claimed = nd.xc_frame.d_of_generator(nd.xc_frame.index[name])
        got = exterior_d(nd.fc_forms[(i, j)])
        want = frame_expand(claimed, nd.xc_coord)
        rep.add(f"d-{name}-derived", got == want, got - want)
    return rep


def omega_hermitian(nd: NilData) -> Form:
    """The Hermitian (1,1)-form sum f_ij ^ e_ij on the complex side,
    expanded in coordinates."""
    w = Form.zero(nd.x_coord)
    for p in nd.pairs:
        w = w + nd.f_forms[p].wedge(nd.e_forms[p])
    return w


def omega_canonical(nd: NilData) -> Form:
    w = Form.zero(nd.xc_coord)
    for i, j in nd.pairs:
        w = w + Form.monomial(nd.xc_coord, [f"dthc{i}{j}", f"dr{i}{j}"])
    return w


def big_omega_iia(nd: NilData) -> tuple[list[Form], Form]:
    """Factors fc_jk + i e_jk (dictionary order) and their product, expanded
    on the symplectic-side coordinates."""
    factors = []
    prod = Form.scalar(nd.xc_coord, 1)
    for p in nd.pairs:
        f = nd.fc_forms[p] + nd.e_forms[p].transport(nd.xc_coord) * I
        factors.append(f)
        prod = prod.wedge(f)
    return factors, prod


def build_iib_side(nd: NilData) -> SUStructure:
    """Complex side: holomorphic volume form in the coordinates z_ij =
    th_ij + i r_ij, Hermitian form sum f ^ e."""
    factors = []
    for i, j in nd.pairs:
        factors.append(
            Form.gen(nd.x_coord, f"dth{i}{j}") + Form.gen(nd.x_coord, f"dr{i}{j}") * I
        )
    basis = ComplexBasis(
        nd.x_coord,
        [(f"dz{i}{j}", f) for (i, j), f in zip(nd.pairs, factors)],
    )
    return SUStructure(
        nd.n,
        nd.x_coord,
        omega_hermitian(nd),
        Omega_factors=factors,
        complex_basis=basis,
    )


def build_iia_side(nd: NilData) -> SUStructure:
    """Symplectic side: canonical symplectic form, volume form wedge of
    fc + i e, fiber polarization."""
    factors, prod = big_omega_iia(nd)
    return SUStructure(
        nd.n,
        nd.xc_coord,
        omega_canonical(nd),
        Omega_factors=factors,
        polarization=Polarization(GenClass.FIBER_X, None),
    )


@dataclass
class MirrorArtifacts:
    pair: SemiflatPair
    su_iib: SUStructure
    su_mirror: SUStructure
    omega_iib: Form
    rho_a: Form
    rho_b: Form
    ft_of_rho_a: Form


def check_mirror_pair(nd: NilData) -> tuple[CheckReport, MirrorArtifacts]:
    """Full transform pipeline on the pair: volume-form match, conformal
    product, both supersymmetry systems, and the flux correspondence."""
    rep = CheckReport("mirror-pair", config={"K": nd.K, "n": nd.n})
    n = nd.n
    pair = SemiflatPair(
        n,
        base_vars=nd.base_vars,
        fiber_x_labels=[f"dthc{i}{j}" for i, j in nd.pairs],
        fiber_mirror_labels=[f"dth{i}{j}" for i, j in nd.pairs],
        holo_labels=[f"dz{i}{j}" for i, j in nd.pairs],
    )
    su_b = build_iib_side(nd)
    rep.extend(check_iib(su_b))

    w = omega_hermitian(nd).transport(pair.frame_xc)
    su_a = mirror_transform(pair, w)
    rep.extend(check_iia(su_a))

    exp_2w = pair.basis_xc.to_complex(w * 2).exp_nilpotent()
    omega_fm = pair.fm_forward(exp_2w)
    rep.add("volume-form-integral-vs-closed-form", omega_fm == su_a.Omega,
            omega_fm - su_a.Omega)

    _, omega_iia_nil = big_omega_iia(nd)
    c = proportional_to(omega_fm, omega_iia_nil.transport(pair.frame_x))
    pref = GaussianRational(1 if (n * (n - 1) // 2) % 2 == 0 else -1)
    rep.add("volume-form-matches-frame-product", c == pref,
            f"constant {c}, expected {pref}")

    f_a = su_a.conformal_factor()
    f_b = su_b.conformal_factor()
    prod_ok = (f_a.ratio * f_b.ratio) == GaussianRational(2) ** (2 * n)
    rep.add("conformal-product", prod_ok, f"F={f_a} Fcheck={f_b}")

    flux_a, rep_a = flux_iia(su_a)
    rep.extend(rep_a)
    flux_b, rep_b = flux_iib(su_b)
    rep.extend(rep_b)

    ft_rho = pair.fm_backward(flux_a.form)
    ft_rho_real = pair.basis_xc.from_complex(ft_rho).transport(nd.x_coord)
    want = flux_b.form * (GaussianRational(2) ** (2 * n + 2))
    rep.add("flux-correspondence", ft_rho_real == want, ft_rho_real - want)

    arts = MirrorArtifacts(
        pair=pair,
        su_iib=su_b,
        su_mirror=su_a,
        omega_iib=w,
        rho_a=flux_a.form,
        rho_b=flux_b.form,
        ft_of_rho_a=ft_rho_real,
    )
    return rep, arts


def dual_pairing_matrix(nd: NilData) -> list[list[Poly]]:
    """<f_ij, fc_ab> with the tangent/cotangent fibers paired positionally."""
    out = []
    for p in nd.pairs:
        row = []
        f = nd.f_forms[p]
        for q in nd.pairs:
            fc = nd.fc_forms[q]
            acc = Poly()
            for r in nd.pairs:
                a = f.coefficient([f"dth{r[0]}{r[1]}"])
                b = fc.coefficient([f"dthc{r[0]}{r[1]}"])
                acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out
