"""Command-line driver: fixtures, verification campaigns, machine reports.

Human-readable lines (including wall-clock timings) go to stdout; report and
fixture files are canonical JSON with no timing data, so a rerun with the same
configuration and seed is byte-identical.  Exit code 0 means every check
passed.
"""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click

from . import cohomology as cohmod
from . import nilmanifold as nil
from .calculus import exterior_d
from .coeffring import GaussianRational
from .exterior import Form, FrameMismatch, GenClass
from .fourier import SemiflatPair
from .proptest import SUITES
from .reports import CheckReport
from .sustruct import SUStructure, check_iia, check_iib

FIXTURE_SCHEMA = "syzkit-fixture-v1"
REPORT_SCHEMA = "syzkit-report-v1"

MAX_DEGREE = int(os.environ.get("SYZKIT_MAX_DEGREE", 4))


def _emit(report: CheckReport, out: str | None, command: str, t0: float, extra: dict | None = None) -> None:
    doc = {
        "schema": REPORT_SCHEMA,
        "command": command,
        "config": report.config,
        "checks": [i.to_json() for i in report.items],
        "passed": report.passed,
    }
    if extra:
        doc.update(extra)
    text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if out:
        Path(out).write_text(text)
    for line in report.summary_lines():
        click.echo(line)
    status = "ok" if report.passed else "FAILED"
    click.echo(f"{command}: {status} ({len(report.items)} checks, {time.time() - t0:.2f}s)")
    if not report.passed:
        click.echo(f"first failing check: {report.failed_ids[0]}")
        sys.exit(1)


@click.group()
def main():
    """Exact verification engine for semi-flat torus-fibration dualities."""


@main.command("nil")
@click.option("--K", "k", type=int, required=True, help="matrix size (>= 2)")
@click.option("--out", type=click.Path(), default=None, help="output directory for fixtures + report")
def cmd_nil(k: int, out: str | None):
    """Build the size-K family and verify structure, invariance, balancedness,
    duality pairing, and the full mirror pipeline."""
    t0 = time.time()
    try:
        nd = nil.build(k)
    except ValueError as e:
        raise click.UsageError(str(e))
    rep = CheckReport("nil", config={"K": k, "n": nd.n})
    rep.extend(nil.structure_equations(nd))
    rep.extend(nil.check_gamma_invariance(nd))

    pairing = nil.dual_pairing_matrix(nd)
    ok = all(
        pairing[i][j] == (1 if i == j else 0)
        for i in range(nd.n)
        for j in range(nd.n)
    )
    rep.add("dual-pairing-identity", ok)

    su_b = nil.build_iib_side(nd)
    if nd.n >= 3:
        wk = Form.scalar(nd.x_coord, 1)
        for _ in range(nd.n - 2):
            wk = wk.wedge(su_b.omega)
        d_wk = exterior_d(wk)
        rep.add("d-omega-power-n-minus-2-nonzero", not d_wk.is_zero())

    mirror_rep, arts = nil.check_mirror_pair(nd)
    rep.extend(mirror_rep)

    if out:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        su_a = arts.su_mirror
        for name, su in (("iib", su_b), ("iia", su_a)):
            doc = {"schema": FIXTURE_SCHEMA, "kind": "su-structure", "K": k}
            doc.update(su.to_json())
            (outdir / f"{name}-K{k}.json").write_text(
                json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
            )
        _emit(rep, str(outdir / f"nil-K{k}-report.json"), "nil", t0)
    else:
        _emit(rep, None, "nil", t0)


@main.command("fm")
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--direction", type=click.Choice(["fwd", "back"]), required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--out", type=click.Path(), default=None)
def cmd_fm(input_path: str, direction: str, n: int, out: str | None):
    """Transform a form (JSON) across the standard rank-n pair."""
    t0 = time.time()
    pair = SemiflatPair(n)
    obj = json.loads(Path(input_path).read_text())
    frames = {
        tuple(g.label for g in f.generators): f
        for f in (pair.holo_frame, pair.frame_xc, pair.frame_x)
    }
    key = tuple(obj.get("frame", ()))
    if key not in frames:
        raise click.UsageError(f"unknown frame labels {list(key)} for n={n}")
    form = Form.from_json(obj, frames[key])
    bad = form.used_coeff_vars() - set(pair.base_vars)
    if bad:
        raise click.UsageError(f"coefficients depend on non-base variables {sorted(bad)}")
    try:
        if direction == "fwd":
            result = pair.fm_forward(form)
        else:
            result = pair.fm_backward(form)
    except FrameMismatch as e:
        raise click.UsageError(f"form is on the wrong side for --direction {direction}: {e}")
    fibers = sorted(result.leg_count(GenClass.FIBER_X if direction == "fwd" else GenClass.FIBER_MIRROR))
    bases = sorted(result.leg_count(GenClass.BASE))
    click.echo(f"fiber legs {fibers}, base legs {bases}")
    text = json.dumps(result.to_json(), sort_keys=True, separators=(",", ":")) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    click.echo(f"fm: ok ({time.time() - t0:.2f}s)")


@main.command("verify")
@click.option("--system", type=click.Choice(["iia", "iib"]), required=True)
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None)
def cmd_verify(system: str, input_path: str, out: str | None):
    """Run the supersymmetry-system checks on a structure fixture."""
    t0 = time.time()
    obj = json.loads(Path(input_path).read_text())
    if obj.get("schema") != FIXTURE_SCHEMA:
        raise click.UsageError(f"expected schema {FIXTURE_SCHEMA}")
    su = SUStructure.from_json(obj)
    rep = check_iia(su) if system == "iia" else check_iib(su)
    rep.config = {"system": system, "n": su.n}
    _emit(rep, out, "verify", t0)


@main.command("cohomology")
@click.option("--K", "k", type=int, required=True)
@click.option("--side", type=click.Choice(["x", "xcheck"]), default=None,
              help="x = symplectic side (ty), xcheck = complex side (bc); inferred from --which")
@click.option("--which", type=click.Choice(["bc", "ty", "mirror"]), required=True)
@click.option("--p", "p", type=int, required=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--degree", "degree", type=int, default=1)
@click.option("--out", type=click.Path(), default=None)
def cmd_cohomology(k: int, side: str | None, which: str, p: int, q: int, degree: int, out: str | None):
    """Invariant-cohomology dimensions (and the mirror comparison) for the
    size-K family at coefficient degree <= degree."""
    t0 = time.time()
    if degree > MAX_DEGREE:
        raise click.UsageError(
            f"--degree {degree} exceeds cap {MAX_DEGREE} (set SYZKIT_MAX_DEGREE to raise)"
        )
    wanted = {"bc": "xcheck", "ty": "x"}.get(which)
    if side is not None and wanted is not None and side != wanted:
        raise click.UsageError(f"--which {which} lives on --side {wanted}")
    try:
        nd = nil.build(k)
    except ValueError as e:
        raise click.UsageError(str(e))
    pair = SemiflatPair(
        nd.n,
        base_vars=nd.base_vars,
        fiber_x_labels=[f"dthc{i}{j}" for i, j in nd.pairs],
        fiber_mirror_labels=[f"dth{i}{j}" for i, j in nd.pairs],
        holo_labels=[f"dz{i}{j}" for i, j in nd.pairs],
    )
    rep = CheckReport("cohomology", config={
        "K": k, "side": side or wanted or "both", "which": which,
        "p": p, "q": q, "D": degree,
    })
    extra: dict = {}
    try:
        if which == "bc":
            cpx = cohmod.bc_complex(pair.basis_xc, degree)
            r = cohmod.bott_chern(cpx, p, q)
            rep.add_status(f"bc-dim({p},{q})", "pass", str(r.dim))
            extra["cohomology"] = {"bc": r.to_json()}
        elif which == "ty":
            cpx = cohmod.ty_complex(pair.frame_x, degree)
            r = cohmod.tseng_yau(cpx, p, q)
            rep.add_status(f"ty-dim({p},{q})", "pass", str(r.dim))
            extra["cohomology"] = {"ty": r.to_json()}
        else:
            ty = cohmod.ty_complex(pair.frame_x, degree)
            bc = cohmod.bc_complex(pair.basis_xc, degree)
            mrep, bc_r, ty_r = cohmod.mirror_compare(ty, bc, p, q, pair.fm_forward)
            rep.extend(mrep)
            rep.add_status("dims", "pass", f"bc={bc_r.dim} ty={ty_r.dim}")
            extra["cohomology"] = {"bc": bc_r.to_json(), "ty": ty_r.to_json()}
    except cohmod.SpanEscape as e:
        raise click.UsageError(f"{e}; raise --degree")
    _emit(rep, out, "cohomology", t0, extra)


@main.command("proptest")
@click.option("--suite", type=click.Choice(sorted(SUITES)), required=True)
@click.option("--trials", type=int, default=100)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default=None)
def cmd_proptest(suite: str, trials: int, seed: int, out: str | None):
    """Run a named randomized campaign with per-trial derived seeds."""
    t0 = time.time()
    rep = SUITES[suite](trials, seed)
    rep.config = {"suite": suite, "trials": trials, "seed": seed}
    _emit(rep, out, "proptest", t0)


if __name__ == "__main__":
    main()
