"""Command-line front end.

    prolate-fd basis --c 10 --T 1 --n 12 --out b.json
    prolate-fd verify b.json --suite bounds
    prolate-fd synth model.json --T 3.1623 --dt 0.01 --out signal.csv
    prolate-fd analyze signal.csv plan.json --out result.json
    prolate-fd interpolate samples.csv --W 10 --t-min -1 --t-max 1 --points 101

Exit codes: 0 success, 2 validation, 3 numeric-consistency failure, 4 I/O.
"""
import csv
import io
import json
import math
import sys

import click
import numpy as np

from . import jsonio
from .errors import ProlateError, ValidationError
from .filter_diag import DiscreteSignal, SampledSignal, band_sweep
from .pswf import BandTimeSpec, basis_from_json, basis_to_json, build_basis
from .sampling import SampleGrid, shannon_interpolate
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class NumericFailure(ProlateError):
    """A verification suite reported violations."""


def _read_text(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path, text):
    if path is None or path == "-":
        click.echo(text, nl=False)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ValidationError("%s: invalid JSON (%s)" % (path, exc)) from exc


def read_csv_columns(text, columns, source="<csv>"):
    """Parse a headed CSV into float columns; errors carry the line number."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError("%s: empty file" % source)
    header = [h.strip() for h in rows[0]]
    if header != list(columns):
        raise ValidationError("%s:1: expected header %s, got %s"
                              % (source, ",".join(columns), ",".join(header)))
    out = [[] for _ in columns]
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(columns):
            raise ValidationError("%s:%d: expected %d fields, got %d"
                                  % (source, lineno, len(columns), len(row)))
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ValidationError("%s:%d: cannot parse %r as a number"
                                      % (source, lineno, cell)) from None
            if not math.isfinite(v):
                raise ValidationError("%s:%d: non-finite value" % (source, lineno))
            out[j].append(v)
    return [np.array(c) for c in out]


def write_csv(columns, header):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join("%.17g" % v for v in row) + "\n")
    return buf.getvalue()


def _spec(c, T, W):
    return BandTimeSpec.from_any(c=c, T=T, W=W)


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Prolate spheroidal wave functions and prolate filter diagonalization."""


@cli.command("basis")
@click.option("--c", "c", type=float, default=None, help="band-time product W*T")
@click.option("--T", "T", type=float, default=None, help="half time window")
@click.option("--W", "W", type=float, default=None, help="half bandwidth (angular)")
@click.option("--n", "n", type=int, required=True, help="number of prolates")
@click.option("--quad-order", type=int, default=200, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_basis(c, T, W, n, quad_order, out):
    """Build a prolate basis and write it as JSON."""
    if n < 1:
        raise ValidationError("--n must be at least 1")
    b = build_basis(_spec(c, T, W), n, quad_order=quad_order)
    _write_text(out, basis_to_json(b))
    click.echo("c=%.17g T=%.17g W=%.17g" % (b.c, b.T, b.W))
    click.echo("%4s %24s %24s %24s" % ("n", "gamma", "1-gamma", "lambda"))
    for k in range(b.count):
        click.echo("%4d %24.17g %24.17g %24.17g"
                   % (k, b.gamma[k], b.one_minus_gamma[k], b.lam[k]))
    return EXIT_OK


@cli.command("verify")
@click.argument("basis_path", required=False, type=click.Path(dir_okay=False))
@click.option("--suite", required=True, type=click.Choice(SUITES))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=500, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_verify(basis_path, suite, seed, trials, out):
    """Run an invariant suite; JSON lines, exit 0 iff no violations."""
    basis = basis_from_json(_read_text(basis_path)) if basis_path else None
    records = run_suite(suite, basis, seed=seed, trials=trials)
    text = "".join(jsonio.dumps(r, indent=None) for r in records)
    _write_text(out, text)
    bad = sum(1 for r in records if r.get("violation"))
    if bad:
        raise NumericFailure("%d violation(s) in suite %s" % (bad, suite))
    return EXIT_OK


@cli.command("synth")
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option("--T", "T", type=float, required=True)
@click.option("--dt", type=float, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_synth(model_path, T, dt, out):
    """Sample C(t) = sum |a_k|^2 exp(i w_k t) on a grid covering [-2T, 2T]."""
    sig = load_model(_load_json(model_path))
    s = sig.synthesize(T, dt)
    _write_text(out, write_csv([s.times, s.values.real, s.values.imag], ["t", "re", "im"]))
    return EXIT_OK


def load_model(data):
    """Model JSON: {"tones": [{"omega": w, "amplitude": a}, ...]} or [[w, a], ...]."""
    tones = data.get("tones") if isinstance(data, dict) else data
    if not isinstance(tones, list):
        raise ValidationError("model must list tones")
    om, am = [], []
    for i, t in enumerate(tones):
        try:
            if isinstance(t, dict):
                om.append(float(t["omega"]))
                am.append(float(t["amplitude"]))
            else:
                w, a = t
                om.append(float(w))
                am.append(float(a))
        except (KeyError, TypeError, ValueError):
            raise ValidationError("tone %d must give omega and amplitude" % i) from None
    return DiscreteSignal(om, am)


def load_plan(data):
    if not isinstance(data, dict):
        raise ValidationError("plan must be a JSON object")
    try:
        spec = _spec(data.get("c"), data.get("T"), data.get("W"))
        M = int(data["M"])
        N = int(data.get("N", M + 4))
        q = int(data.get("quad_order", 200))
        bands = data["bands"]
    except KeyError as exc:
        raise ValidationError("plan is missing %s" % exc) from None
    except (TypeError, ValueError) as exc:
        raise ValidationError("plan field has wrong type: %s" % exc) from None
    if N < M:
        raise ValidationError("plan N=%d is smaller than M=%d" % (N, M))
    return spec, M, N, q, bands


@cli.command("analyze")
@click.argument("signal_path", type=click.Path(dir_okay=False))
@click.argument("plan_path", type=click.Path(dir_okay=False))
@click.option("--m", "M", type=int, default=None, help="filters per band (overrides plan)")
@click.option("--bands", default=None, help="comma-separated band centres (overrides plan)")
@click.option("--threads", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_analyze(signal_path, plan_path, M, bands, threads, out):
    """Band-sweep filter diagonalization of a sampled signal."""
    spec, M_plan, N, q, plan_bands = load_plan(_load_json(plan_path))
    M = M_plan if M is None else M
    if bands is not None:
        try:
            plan_bands = [float(x) for x in bands.split(",") if x.strip()]
        except ValueError:
            raise ValidationError("--bands must be comma-separated numbers") from None
    t, re, im = read_csv_columns(_read_text(signal_path), ("t", "re", "im"), signal_path)
    sig = SampledSignal(t, re + 1j * im)
    if not sig.covers(spec.T):
        raise ValidationError("signal covers [%.17g, %.17g]; need [%.17g, %.17g]"
                              % (t[0], t[-1], -2 * spec.T, 2 * spec.T))
    basis = build_basis(spec, max(N, M), quad_order=q)
    results, _ = band_sweep(sig, plan_bands, basis, M, threads=threads)
    bands_out = []
    for r in results:
        d = r.to_dict()
        for f in d["frequencies"]:
            if f["lower"] is None:
                f["reason"] = r.reason or "bounds unavailable"
        bands_out.append(d)
    _write_text(out, jsonio.dumps({"bands": bands_out}))
    return EXIT_OK


@cli.command("interpolate")
@click.argument("samples_path", type=click.Path(dir_okay=False))
@click.option("--W", "W", type=float, required=True, help="half bandwidth; samples at k*pi/W")
@click.option("--t-min", type=float, required=True)
@click.option("--t-max", type=float, required=True)
@click.option("--points", type=int, default=101, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_interpolate(samples_path, W, t_min, t_max, points, out):
    """Shannon interpolation of Nyquist samples (CSV columns k,re,im)."""
    if points < 1:
        raise ValidationError("--points must be positive")
    k, re, im = read_csv_columns(_read_text(samples_path), ("k", "re", "im"), samples_path)
    if k.size == 0:
        raise ValidationError("no samples")
    ki = np.round(k).astype(int)
    if np.any(ki != k) or np.any(np.diff(ki) != 1):
        raise ValidationError("k must be consecutive integers")
    grid = SampleGrid(W, int(ki[0]), int(ki[-1]), re + 1j * im)
    tt = np.linspace(t_min, t_max, points)
    v = shannon_interpolate(grid, tt)
    _write_text(out, write_csv([tt, v.real, v.imag], ["t", "re", "im"]))
    return EXIT_OK


def main(argv=None):
    try:
        rv = cli.main(args=argv, prog_name="prolate-fd", standalone_mode=False)
    except click.exceptions.UsageError as exc:
        exc.show()
        return EXIT_VALIDATION
    except click.exceptions.Abort:
        return EXIT_VALIDATION
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except ValidationError as exc:
        click.echo("error: %s" % exc, err=True)
        return EXIT_VALIDATION
    except ProlateError as exc:
        click.echo("error: %s" % exc, err=True)
        return EXIT_NUMERIC
    except OSError as exc:
        click.echo("error: %s" % exc, err=True)
        return EXIT_IO
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
