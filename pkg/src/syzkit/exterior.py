"""Graded exterior algebra of invariant forms over polynomial coefficients.

Generator subsets are stored as bitmasks over a fixed frame ordering; Koszul
signs come from transposition counting.  Forms may have mixed degree (needed
for exponentials), are immutable, and all operations are pure.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .coeffring import GaussianRational, ONE, Poly, P_ONE, Scalarish

Coefflike = Union[int, Fraction, GaussianRational, Poly]


class FrameMismatch(ValueError):
    """Operands live on different frames."""


class NonTriangularFrame(ValueError):
    """Frame expansions cannot be inverted by unit-pivot substitution."""


class GenClass(enum.Enum):
    FIBER_X = "fiber-x"           # torus-fiber directions of the symplectic side
    FIBER_MIRROR = "fiber-mirror" # torus-fiber directions of the dual/complex side
    BASE = "base"                 # base directions (paired with coefficient variables)
    FRAME = "frame"               # abstract global one-forms with a coordinate expansion


class Generator:
    """A labeled one-form generator of a frame."""

    __slots__ = ("label", "gclass", "coord_expansion", "paired_base_var", "leg_class")

    def __init__(
        self,
        label: str,
        gclass: GenClass,
        coord_expansion: Optional["Form"] = None,
        paired_base_var: Optional[str] = None,
        leg_class: Optional[GenClass] = None,
    ):
        if gclass is GenClass.FRAME:
            if coord_expansion is None:
                raise ValueError(f"frame generator {label!r} needs a coordinate expansion")
            if leg_class is None:
                classes = {
                    coord_expansion.frame.generators[i].gclass
                    for mask in coord_expansion.terms
                    for i in bits(mask)
                }
                if len(classes) == 1:
                    leg_class = classes.pop()
        else:
            if leg_class is None:
                leg_class = gclass
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "gclass", gclass)
        object.__setattr__(self, "coord_expansion", coord_expansion)
        object.__setattr__(self, "paired_base_var", paired_base_var)
        object.__setattr__(self, "leg_class", leg_class)

    def __setattr__(self, name, value):
        raise AttributeError("Generator is immutable")

    def __repr__(self):
        return f"Generator({self.label!r}, {self.gclass.value})"


class FrameSpec:
    """Ordered list of generators plus the base-coordinate variables.

    The generator order is the canonical ordering for bitmask monomials, for
    Koszul signs, and for fiber integration.  `n` is the fiber rank.
    """

    def __init__(self, generators: Sequence[Generator], base_vars: Sequence[str], n: int):
        gens = tuple(generators)
        labels = [g.label for g in gens]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique within a frame")
        self.generators = gens
        self.base_vars = tuple(base_vars)
        self.n = n
        self.index = {g.label: i for i, g in enumerate(gens)}
        self._d_gen: list[Optional[Form]] = [None] * len(gens)
        self._base_one_forms: dict[str, Form] = {}
        for i, g in enumerate(gens):
            if g.paired_base_var is not None:
                self._base_one_forms[g.paired_base_var] = Form.gen(self, g.label)
        self._collect_images: Optional[dict[int, Form]] = None

    # frames are compared structurally so that reconstructed frames interoperate
    def _signature(self):
        return (
            tuple((g.label, g.gclass, g.paired_base_var, g.leg_class) for g in self.generators),
            self.base_vars,
            self.n,
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FrameSpec):
            return NotImplemented
        return self._signature() == other._signature()

    def __hash__(self):
        return hash(self._signature())

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"FrameSpec([{', '.join(g.label for g in self.generators)}], n={self.n})"

    def class_mask(self, cls: GenClass) -> int:
        m = 0
        for i, g in enumerate(self.generators):
            if g.leg_class is cls:
                m |= 1 << i
        return m

    def gens_of_class(self, cls: GenClass) -> list[int]:
        return [i for i, g in enumerate(self.generators) if g.leg_class is cls]

    def base_one_form(self, var: str) -> Optional["Form"]:
        return self._base_one_forms.get(var)

    def d_of_generator(self, i: int) -> Optional["Form"]:
        return self._d_gen[i]

    # builders call these once before the frame is shared
    def _set_structure(self, label: str, d_form: "Form") -> None:
        self._d_gen[self.index[label]] = d_form

    def _set_base_one_form(self, var: str, form: "Form") -> None:
        self._base_one_forms[var] = form


def bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def koszul_sign(mask_a: int, mask_b: int) -> int:
    """Sign of merging the ascending blocks a, b into one ascending monomial.

    Counts pairs (i in a, j in b) with i > j; each is one transposition of
    odd generators.
    """
    swaps = 0
    a = mask_a
    while a:
        low = a & -a
        swaps += (mask_b & (low - 1)).bit_count()
        a ^= low
    return -1 if swaps & 1 else 1


class Form:
    """Element of the exterior algebra: sorted generator subsets -> Poly."""

    __slots__ = ("frame", "terms")

    def __init__(self, frame: FrameSpec, terms: Mapping[int, Coefflike] | None = None):
        clean: dict[int, Poly] = {}
        for mask, c in (terms or {}).items():
            p = c if isinstance(c, Poly) else Poly.constant(c)
            if not p.is_zero():
                clean[mask] = p
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Form is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(frame: FrameSpec) -> "Form":
        return Form(frame, {})

    @staticmethod
    def scalar(frame: FrameSpec, c: Coefflike) -> "Form":
        return Form(frame, {0: c})

    @staticmethod
    def gen(frame: FrameSpec, label: str) -> "Form":
        return Form(frame, {1 << frame.index[label]: P_ONE})

    @staticmethod
    def monomial(frame: FrameSpec, labels: Sequence[str], coeff: Coefflike = 1) -> "Form":
        """Wedge of the named generators in the given order, times coeff."""
        out = Form.scalar(frame, coeff)
        for lab in labels:
            out = out.wedge(Form.gen(frame, lab))
        return out

    # -- basic algebra -----------------------------------------------------

    def _check(self, other: "Form") -> None:
        if self.frame is not other.frame and self.frame != other.frame:
            raise FrameMismatch(f"{self.frame!r} vs {other.frame!r}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        terms = dict(self.terms)
        for m, p in other.terms.items():
            s = terms.get(m)
            s = p if s is None else s + p
            if s.is_zero():
                terms.pop(m, None)
            else:
                terms[m] = s
        return Form(self.frame, terms)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.frame, {m: -p for m, p in self.terms.items()})

    def __mul__(self, c: Coefflike) -> "Form":
        p = c if isinstance(c, Poly) else Poly.constant(c)
        return Form(self.frame, {m: q * p for m, q in self.terms.items()})

    __rmul__ = __mul__

    def wedge(self, other: "Form") -> "Form":
        self._check(other)
        terms: dict[int, Poly] = {}
        for m1, p1 in self.terms.items():
            for m2, p2 in other.terms.items():
                if m1 & m2:
                    continue
                s = koszul_sign(m1, m2)
                m = m1 | m2
                add = p1 * p2
                if s < 0:
                    add = -add
                t = terms.get(m)
                t = add if t is None else t + add
                if t.is_zero():
                    terms.pop(m, None)
                else:
                    terms[m] = t
        return Form(self.frame, terms)

    __xor__ = wedge

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        if self.frame is not other.frame and self.frame != other.frame:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.frame, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # -- grading -----------------------------------------------------------

    def degrees(self) -> set[int]:
        return {m.bit_count() for m in self.terms}

    def part(self, k: int) -> "Form":
        return Form(self.frame, {m: p for m, p in self.terms.items() if m.bit_count() == k})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def top_degree(self) -> int:
        if not self.terms:
            return -1
        return max(m.bit_count() for m in self.terms)

    def leg_count(self, cls: GenClass) -> set[int]:
        cm = self.frame.class_mask(cls)
        return {(m & cm).bit_count() for m in self.terms}

    def bidegree_project(self, p: int, q: int, split: tuple[GenClass, GenClass]) -> "Form":
        """Component with exactly p legs of split[0] and q legs of split[1]
        (and no legs outside the two classes)."""
        m1 = self.frame.class_mask(split[0])
        m2 = self.frame.class_mask(split[1])
        out = {}
        for m, c in self.terms.items():
            if m & ~(m1 | m2):
                continue
            if (m & m1).bit_count() == p and (m & m2).bit_count() == q:
                out[m] = c
        return Form(self.frame, out)

    # -- operations --------------------------------------------------------

    def exp_nilpotent(self) -> "Form":
        """Sum_k self^k / k! -- finite because the input is nilpotent.

        Requires every term to have even degree >= 2 (so the series is
        finite and the factors commute).
        """
        for m in self.terms:
            k = m.bit_count()
            if k == 0 or k % 2:
                raise ValueError("exp requires even-degree terms of degree >= 2")
        out = Form.scalar(self.frame, 1)
        power = Form.scalar(self.frame, 1)
        k = 0
        fact = 1
        while True:
            k += 1
            fact *= k
            power = power.wedge(self)
            if power.is_zero():
                break
            out = out + power * Fraction(1, fact)
        return out

    def pushforward(self, fiber_class: GenClass) -> "Form":
        """Integrate over the fibers of the given class (volume normalized to 1).

        Keeps only terms containing the full top wedge of fiber generators,
        moved to the front in frame order with the Koszul sign.
        """
        top = self.frame.class_mask(fiber_class)
        out: dict[int, Poly] = {}
        for m, c in self.terms.items():
            if m & top != top:
                continue
            rest = m & ~top
            s = koszul_sign(top, rest)
            p = c if s > 0 else -c
            t = out.get(rest)
            t = p if t is None else t + p
            if t.is_zero():
                out.pop(rest, None)
            else:
                out[rest] = t
        return Form(self.frame, out)

    def contract(self, label: str) -> "Form":
        """Interior product with the dual vector of the named generator."""
        i = self.frame.index[label]
        bit = 1 << i
        out: dict[int, Poly] = {}
        for m, c in self.terms.items():
            if not m & bit:
                continue
            sign = -1 if (m & (bit - 1)).bit_count() & 1 else 1
            rest = m ^ bit
            p = c if sign > 0 else -c
            t = out.get(rest)
            t = p if t is None else t + p
            if t.is_zero():
                out.pop(rest, None)
            else:
                out[rest] = t
        return Form(self.frame, out)

    def conjugate(self) -> "Form":
        """Complex-conjugate the coefficients (generators are real)."""
        return Form(self.frame, {m: p.conjugate() for m, p in self.terms.items()})

    def transport(self, frame: FrameSpec) -> "Form":
        """Re-express on another frame by matching generator labels."""
        out = {}
        for m, c in self.terms.items():
            nm = 0
            labels = [self.frame.generators[i].label for i in bits(m)]
            idxs = []
            for lab in labels:
                if lab not in frame.index:
                    raise FrameMismatch(f"generator {lab!r} missing from target frame")
                idxs.append(frame.index[lab])
            if idxs != sorted(idxs):
                raise FrameMismatch("target frame reorders generators")
            for i in idxs:
                nm |= 1 << i
            out[nm] = c
        return Form(frame, out)

    def coefficient(self, labels: Sequence[str]) -> Poly:
        """Coefficient of the ascending monomial on the named generators."""
        idxs = [self.frame.index[lab] for lab in labels]
        if idxs != sorted(idxs):
            raise ValueError("labels must be in frame order")
        m = 0
        for i in idxs:
            m |= 1 << i
        return self.terms.get(m, Poly())

    def used_coeff_vars(self) -> set[str]:
        out: set[str] = set()
        for p in self.terms.values():
            out |= p.used_vars()
        return out

    def map_coefficients(self, fn: Callable[[Poly], Poly]) -> "Form":
        return Form(self.frame, {m: fn(p) for m, p in self.terms.items()})

    # -- rendering / serialization ------------------------------------------

    def _labels(self, mask: int) -> list[str]:
        return [self.frame.generators[i].label for i in bits(mask)]

    def __str__(self):
        if not self.terms:
            return "0"
        bits_out = []
        for m in sorted(self.terms, key=lambda m: (m.bit_count(), m)):
            mono = "^".join(self._labels(m)) or "1"
            c = self.terms[m]
            cs = str(c)
            if cs == "1" and mono != "1":
                bits_out.append(mono)
            elif cs == "-1" and mono != "1":
                bits_out.append(f"-{mono}")
            elif len(c.terms) > 1 or (mono != "1" and ("+" in cs or " " in cs)):
                bits_out.append(f"({cs})*{mono}" if mono != "1" else f"({cs})")
            else:
                bits_out.append(f"{cs}*{mono}" if mono != "1" else cs)
        out = bits_out[0]
        for b in bits_out[1:]:
            out += f" - {b[1:]}" if b.startswith("-") else f" + {b}"
        return out

    def __repr__(self):
        return f"Form({self})"

    def to_json(self):
        return {
            "frame": [g.label for g in self.frame.generators],
            "terms": [
                {"gens": self._labels(m), "coeff": self.terms[m].to_json()}
                for m in sorted(self.terms, key=lambda m: (m.bit_count(), m))
            ],
        }

    @staticmethod
    def from_json(obj, frame: FrameSpec) -> "Form":
        labels = [g.label for g in frame.generators]
        if obj["frame"] != labels:
            raise FrameMismatch(f"frame labels {obj['frame']} != {labels}")
        out = Form.zero(frame)
        for t in obj["terms"]:
            mono = Form.monomial(frame, t["gens"], 1)
            out = out + mono * Poly.from_json(t["coeff"])
        return out


def substitute_generators(
    form: Form,
    target: FrameSpec,
    images: Mapping[int, Form],
    coeff_map: Callable[[Poly], Poly] | None = None,
) -> Form:
    """Algebra map determined by generator images (one-forms on `target`).

    Every generator used by `form` must have an image; coefficients are
    carried over (optionally transformed first).
    """
    out = Form.zero(target)
    for m, c in form.terms.items():
        if coeff_map is not None:
            c = coeff_map(c)
        term = Form.scalar(target, c)
        for i in bits(m):
            img = images.get(i)
            if img is None:
                raise FrameMismatch(
                    f"no image for generator {form.frame.generators[i].label!r}"
                )
            term = term.wedge(img)
            if term.is_zero():
                break
        out = out + term
    return out


def frame_expand(form: Form, coord_frame: FrameSpec | None = None) -> Form:
    """Replace every frame-class generator by its coordinate expansion."""
    frames = [
        g.coord_expansion.frame
        for g in form.frame.generators
        if g.gclass is GenClass.FRAME and g.coord_expansion is not None
    ]
    if coord_frame is None:
        if not frames:
            return form
        coord_frame = frames[0]
    images = {}
    for i, g in enumerate(form.frame.generators):
        if g.gclass is GenClass.FRAME:
            images[i] = g.coord_expansion.transport(coord_frame)
        else:
            images[i] = Form.gen(coord_frame, g.label)
    return substitute_generators(form, coord_frame, images)


def _collect_images(frame: FrameSpec) -> dict[str, Form]:
    """Express each coordinate generator as a combination of frame generators.

    Solves the (permuted-unitriangular) system by repeated substitution of
    expansions with a single unresolved coordinate and a constant unit pivot.
    """
    pending = []
    for i, g in enumerate(frame.generators):
        if g.gclass is not GenClass.FRAME or g.coord_expansion is None:
            raise NonTriangularFrame(f"{g.label!r} has no coordinate expansion")
        pending.append((i, g))
    solved: dict[str, Form] = {}
    progress = True
    while pending and progress:
        progress = False
        still = []
        for i, g in pending:
            exp = g.coord_expansion
            unknown = []
            for m in exp.terms:
                lab = exp.frame.generators[next(bits(m))].label
                if lab not in solved:
                    unknown.append((m, lab))
            if len(unknown) != 1:
                still.append((i, g))
                continue
            m0, lab0 = unknown[0]
            pivot = exp.terms[m0]
            if not pivot.is_constant():
                still.append((i, g))
                continue
            c0 = pivot.constant_value()
            # lab0 = (g - sum_{solved} c * solved[lab]) / c0
            acc = Form.gen(frame, g.label)
            for m, c in exp.terms.items():
                if m == m0:
                    continue
                lab = exp.frame.generators[next(bits(m))].label
                acc = acc - solved[lab] * c
            solved[lab0] = acc * (ONE / c0)
            progress = True
        pending = still
    if pending:
        raise NonTriangularFrame(
            "cannot invert expansions of " + ", ".join(g.label for _, g in pending)
        )
    return solved


def frame_collect(form: Form, frame: FrameSpec) -> Form:
    """Inverse of frame_expand: rewrite a coordinate form in a frame basis."""
    if frame._collect_images is None:
        by_label = _collect_images(frame)
        frame._collect_images = {  # cached; keyed by coordinate-frame index later
            lab: f for lab, f in by_label.items()
        }
    solved = frame._collect_images
    images = {}
    for i, g in enumerate(form.frame.generators):
        if g.label in solved:
            images[i] = solved[g.label]
    return substitute_generators(form, frame, images)


def brute_force_sign(perm: Sequence[int]) -> int:
    """Permutation sign by counting inversions directly (test oracle)."""
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s
