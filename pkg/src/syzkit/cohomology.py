"""Finite-dimensional invariant cohomology with exact linear algebra.

The complexes are spanned by form monomials times coefficient monomials of
bounded total degree; all the operators in use lower the coefficient degree,
so the span closes.  Ranks and kernels come from the deterministic exact
elimination in `linalg`; dimensions at a given degree bound are reported as
such (per-D data, no asymptotic claims).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import linalg
from .coeffring import GaussianRational, ONE, ZERO, Poly, exponent_vectors
from .exterior import Form, FrameSpec, GenClass, bits
from .calculus import ComplexBasis, SymplecticData, d_lambda, dolbeault, exterior_d
from .reports import CheckReport


class SpanEscape(ValueError):
    """An operator image does not lie in the degree-filtered span."""

    def __init__(self, message: str, witness: Optional[Form] = None):
        super().__init__(message)
        self.witness = witness


class FiniteComplex:
    """Monomial basis of invariant forms with coefficient degree <= D,
    together with named operators acting inside the span."""

    def __init__(
        self,
        frame: FrameSpec,
        D: int,
        operators: dict[str, Callable[[Form], Form]],
        split: tuple[GenClass, GenClass],
        invariance: Optional[Callable[[Form], Form]] = None,
        invariance_extra_vars: Sequence[str] = (),
    ):
        if D < 0:
            raise ValueError("degree bound must be nonnegative")
        self.frame = frame
        self.D = D
        self.split = split
        self.operators = dict(operators)
        self.vars = tuple(sorted(frame.base_vars))
        self.exps = exponent_vectors(len(self.vars), D)
        self.basis: list[tuple[int, tuple[int, ...]]] = []
        size = len(frame)
        for mask in range(1 << size):
            for e in self.exps:
                self.basis.append((mask, e))
        self.pos = {key: i for i, key in enumerate(self.basis)}
        self._verify_closure()
        self.invariant_basis: Optional[list[Form]] = None
        if invariance is not None:
            self.invariant_basis = self._solve_invariance(invariance, invariance_extra_vars)

    # -- vectorization -------------------------------------------------------

    def basis_form(self, idx: int) -> Form:
        mask, e = self.basis[idx]
        return Form(self.frame, {mask: Poly(self.vars, {e: ONE})})

    def vectorize(self, form: Form) -> list[GaussianRational]:
        v = [ZERO] * len(self.basis)
        for mask, poly in form.terms.items():
            p = poly.in_universe(self.vars) if poly.vars != self.vars else poly
            if set(p.vars) != set(self.vars):
                raise SpanEscape(f"coefficients use variables outside {self.vars}", form)
            for e, c in p.terms.items():
                key = (mask, e)
                if key not in self.pos:
                    raise SpanEscape(
                        f"term of coefficient degree {sum(e)} escapes the degree-{self.D} span",
                        form,
                    )
                v[self.pos[key]] = c
        return v

    def form_of(self, vec: Sequence[GaussianRational]) -> Form:
        out = Form.zero(self.frame)
        for i, c in enumerate(vec):
            if c:
                mask, e = self.basis[i]
                out = out + Form(self.frame, {mask: Poly(self.vars, {e: c})})
        return out

    # -- structure ------------------------------------------------------------

    def slot(self, p: int, q: int) -> list[int]:
        m1 = self.frame.class_mask(self.split[0])
        m2 = self.frame.class_mask(self.split[1])
        out = []
        for i, (mask, _) in enumerate(self.basis):
            if mask & ~(m1 | m2):
                continue
            if (mask & m1).bit_count() == p and (mask & m2).bit_count() == q:
                out.append(i)
        return out

    def apply(self, op: str, form: Form) -> Form:
        return self.operators[op](form)

    def matrix_on_slot(self, op: str, from_idx: Sequence[int], to_idx: Optional[Sequence[int]] = None):
        """Columns are op(basis element); rows restricted to `to_idx` when
        given (after checking nothing leaks outside it)."""
        cols = []
        for i in from_idx:
            img = self.vectorize(self.apply(op, self.basis_form(i)))
            cols.append(img)
        if to_idx is None:
            rows = range(len(self.basis))
        else:
            keep = set(to_idx)
            for img in cols:
                for r, c in enumerate(img):
                    if c and r not in keep:
                        raise SpanEscape(f"operator {op} leaks outside the target slot")
            rows = list(to_idx)
        return [[col[r] for col in cols] for r in rows]

    def _verify_closure(self) -> None:
        for name, op in self.operators.items():
            for i in range(len(self.basis)):
                self.vectorize(op(self.basis_form(i)))

    def _solve_invariance(self, pullback, extra_vars: Sequence[str]) -> list[Form]:
        all_vars = tuple(sorted(set(self.vars) | set(extra_vars)))
        rows: dict[tuple, int] = {}
        cols = []
        for i in range(len(self.basis)):
            f = self.basis_form(i)
            diff = pullback(f) - f
            entries: dict[int, GaussianRational] = {}
            for mask, poly in diff.terms.items():
                p = poly.in_universe(all_vars) if poly.vars != all_vars else poly
                for e, c in p.terms.items():
                    key = (mask, e)
                    if key not in rows:
                        rows[key] = len(rows)
                    entries[rows[key]] = c
            cols.append(entries)
        mat = [[ZERO] * len(self.basis) for _ in range(len(rows))]
        for j, entries in enumerate(cols):
            for r, c in entries.items():
                mat[r][j] = c
        kernel = linalg.nullspace(mat) if rows else [
            [ONE if k == j else ZERO for k in range(len(self.basis))]
            for j in range(len(self.basis))
        ]
        out = [self.form_of(v) for v in kernel]
        # closure of the invariant span under every operator
        if out:
            span_cols = [self.vectorize(f) for f in out]
            base_rank = linalg.rank(_columns_to_matrix(span_cols))
            for name, op in self.operators.items():
                for f in out:
                    ext = span_cols + [self.vectorize(op(f))]
                    if linalg.rank(_columns_to_matrix(ext)) != base_rank:
                        raise SpanEscape(f"operator {name} leaves the invariant span", op(f))
        return out


def _columns_to_matrix(cols: list[list[GaussianRational]]):
    if not cols:
        return []
    return [[col[r] for col in cols] for r in range(len(cols[0]))]


@dataclass
class CohomologyReport:
    D: int
    bidegree: tuple[int, int]
    dim: int
    representatives: list[Form]
    operator_ranks: dict[str, int] = field(default_factory=dict)

    def to_json(self):
        return {
            "D": self.D,
            "bidegree": list(self.bidegree),
            "dim": self.dim,
            "representatives": [f.to_json() for f in self.representatives],
            "operator_ranks": dict(sorted(self.operator_ranks.items())),
        }


def _quotient_report(
    cpx: FiniteComplex,
    p: int,
    q: int,
    kernel_ops: Sequence[str],
    image_op: str,
    image_from: tuple[int, int],
) -> CohomologyReport:
    slot = cpx.slot(p, q)
    stacked = []
    for op in kernel_ops:
        stacked.extend(cpx.matrix_on_slot(op, slot))
    if stacked:
        ker = linalg.nullspace(stacked)
    else:
        ker = [[ONE if k == j else ZERO for k in range(len(slot))] for j in range(len(slot))]
    src = cpx.slot(*image_from)
    im_cols = []
    if src:
        m = cpx.matrix_on_slot(image_op, src, slot)
        for j in range(len(src)):
            im_cols.append([m[r][j] for r in range(len(slot))])
    rank_im = linalg.rank(_columns_to_matrix(im_cols)) if im_cols else 0
    dim = len(ker) - rank_im

    pivots = linalg.column_space_pivots(im_cols + ker)
    reps = []
    for piv in pivots:
        if piv >= len(im_cols):
            v = ker[piv - len(im_cols)]
            full = [ZERO] * len(cpx.basis)
            for k, idx in enumerate(slot):
                full[idx] = v[k]
            reps.append(cpx.form_of(full))
    if len(reps) != dim:
        raise ArithmeticError("representative count disagrees with the computed dimension")
    ranks = {f"ker({'+'.join(kernel_ops)})": len(ker), f"rank({image_op})": rank_im}
    return CohomologyReport(cpx.D, (p, q), dim, reps, ranks)


# -- concrete complexes ------------------------------------------------------


def bc_complex(basis: ComplexBasis, D: int, invariance=None, invariance_extra_vars=()) -> FiniteComplex:
    """Complex-side complex on the dz/dzb monomial frame with d and del-dbar."""

    def d_op(f: Form) -> Form:
        return exterior_d(f)

    def deldbar(f: Form) -> Form:
        _, db = dolbeault(f, basis)
        dl, _ = dolbeault(db, basis)
        return dl

    return FiniteComplex(
        basis.holo_frame,
        D,
        {"d": d_op, "deldbar": deldbar},
        (GenClass.FIBER_MIRROR, GenClass.BASE),
        invariance=invariance,
        invariance_extra_vars=invariance_extra_vars,
    )


def ty_complex(frame: FrameSpec, D: int, fiber_class: GenClass = GenClass.FIBER_X) -> FiniteComplex:
    """Symplectic-side complex with d, d^Lambda and their composite."""
    symp = SymplecticData.darboux(frame, fiber_class)

    def d_op(f: Form) -> Form:
        return exterior_d(f)

    def dl_op(f: Form) -> Form:
        return d_lambda(f, symp)

    def ddl_op(f: Form) -> Form:
        return exterior_d(d_lambda(f, symp))

    return FiniteComplex(
        frame,
        D,
        {"d": d_op, "dlambda": dl_op, "ddlambda": ddl_op},
        (fiber_class, GenClass.BASE),
    )


def bott_chern(cpx: FiniteComplex, p: int, q: int) -> CohomologyReport:
    """Closed (p,q) monomial forms modulo del-dbar images, exactly."""
    return _quotient_report(cpx, p, q, ["d"], "deldbar", (p - 1, q - 1))


def tseng_yau(cpx: FiniteComplex, p: int, q: int) -> CohomologyReport:
    """Forms killed by d and d^Lambda in the (p,q) slot modulo d d^Lambda
    images (which arrive from the (p+1, q-1) slot)."""
    return _quotient_report(cpx, p, q, ["d", "dlambda"], "ddlambda", (p + 1, q - 1))


def mirror_compare(
    ty: FiniteComplex,
    bc: FiniteComplex,
    p: int,
    q: int,
    transform: Callable[[Form], Form],
) -> tuple[CheckReport, CohomologyReport, CohomologyReport]:
    """Dimensions must agree between the (p,q) complex-side quotient and the
    (n-p, q) symplectic-side quotient, and the transform must carry
    representatives to closed forms independent modulo images."""
    n = ty.frame.n
    rep = CheckReport("cohomology-mirror", config={"p": p, "q": q, "D": ty.D})
    bc_rep = bott_chern(bc, p, q)
    ty_rep = tseng_yau(ty, n - p, q)
    rep.add("dims-equal", bc_rep.dim == ty_rep.dim, f"bc={bc_rep.dim} ty={ty_rep.dim}")

    slot = ty.slot(n - p, q)
    src = ty.slot(n - p + 1, q - 1)
    im_cols = []
    if src:
        m = ty.matrix_on_slot("ddlambda", src, slot)
        for j in range(len(src)):
            im_cols.append([m[r][j] for r in range(len(slot))])
    mapped_cols = []
    for f in bc_rep.representatives:
        g = transform(f)
        rep.add(f"image-d-closed[{len(mapped_cols)}]", ty.apply("d", g).is_zero(), g)
        rep.add(f"image-dlambda-closed[{len(mapped_cols)}]", ty.apply("dlambda", g).is_zero(), g)
        vec = ty.vectorize(g)
        for i, c in enumerate(vec):
            if c and i not in set(slot):
                raise SpanEscape("transformed representative leaves the mirror slot", g)
        mapped_cols.append([vec[i] for i in slot])
    base_rank = linalg.rank(_columns_to_matrix(im_cols)) if im_cols else 0
    tot_rank = linalg.rank(_columns_to_matrix(im_cols + mapped_cols)) if (im_cols or mapped_cols) else 0
    rep.add(
        "images-independent-mod-exact",
        tot_rank == base_rank + len(mapped_cols),
        f"rank {tot_rank} vs {base_rank}+{len(mapped_cols)}",
    )
    return rep, bc_rep, ty_rep
