"""Command-line front end: exact, closed-form, and Monte Carlo computations.

All commands share the graph-source flags (--graph / --family / --gnp), grid
flags (--lambda / --r as comma lists or start:stop:count ranges), and the
--init specification.  Output is CSV (default) or JSON with identical fields;
rerunning a command with the same flags produces byte-identical output.

Exit codes: 0 success, 2 usage error, 3 domain error (disconnected sample,
instance too large, no applicable closed form, ...), 4 estimator abort.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from fractions import Fraction

import click

from . import closed_forms, exact, estimator
from ._util import mix64
from .graphs import (
    DISCONNECTED,
    Graph,
    GraphError,
    book_graph,
    complete_graph,
    cycle_graph,
    degree_profile,
    generate_gnp,
    gnp_edges,
    parse_edge_list,
    path_graph,
    star_graph,
)
from .process import Configuration, ProcessParams

_DOMAIN_ERRORS = (
    GraphError,
    exact.TooLargeError,
    exact.NonConvergenceError,
    closed_forms.NotBidegreedError,
    closed_forms.SingularRecurrenceError,
    estimator.InvalidConfigError,
)

_FAMILIES = {
    "cycle": cycle_graph,
    "star": star_graph,
    "complete": complete_graph,
    "path": path_graph,
    "book": book_graph,
}


class DomainError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _emit(rows: list[dict], fields: list[str], fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        payload = [{k: _fmt(row[k]) for k in fields} for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in fields])
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _parse_grid(spec: str, name: str) -> list[float]:
    spec = spec.strip()
    if not spec:
        raise click.UsageError(f"empty {name} grid")
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise click.UsageError(f"{name} range must be start:stop:count, got {spec!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise click.UsageError(f"bad {name} range {spec!r}") from None
        if count < 1:
            raise click.UsageError(f"{name} range count must be >= 1")
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    try:
        values = [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise click.UsageError(f"bad {name} list {spec!r}") from None
    if not values:
        raise click.UsageError(f"empty {name} grid")
    return values


def _load_graph(graph_path: str | None, family: str | None, gnp: str | None) -> Graph:
    sources = sum(x is not None for x in (graph_path, family, gnp))
    if sources != 1:
        raise click.UsageError("give exactly one of --graph, --family, --gnp")
    if graph_path is not None:
        with open(graph_path) as fh:
            return parse_edge_list(fh.read())
    if family is not None:
        name, _, arg = family.partition(":")
        if name not in _FAMILIES or not arg:
            raise click.UsageError(
                f"--family must be one of {sorted(_FAMILIES)} with an argument, "
                f"e.g. cycle:12; got {family!r}"
            )
        try:
            size = int(arg)
        except ValueError:
            raise click.UsageError(f"bad family argument in {family!r}") from None
        return _FAMILIES[name](size)
    parts = gnp.split(",")
    if len(parts) != 3:
        raise click.UsageError(f"--gnp must be n,p,seed; got {gnp!r}")
    try:
        n, p, seed = int(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise click.UsageError(f"bad --gnp value {gnp!r}") from None
    g = generate_gnp(n, p, seed)
    if g is DISCONNECTED:
        raise DomainError(f"G({n}, {p}) sample with seed {seed} is disconnected")
    return g


def _parse_inits(spec: str, g: Graph) -> list[tuple[str, Configuration]]:
    spec = spec.strip()
    if spec == "all-singletons":
        return [(f"vertex:{v}", Configuration.from_vertices([v], g.n)) for v in range(g.n)]
    kind, _, arg = spec.partition(":")
    if kind == "vertex" and arg:
        try:
            v = int(arg)
        except ValueError:
            raise click.UsageError(f"bad --init {spec!r}") from None
        if not 0 <= v < g.n:
            raise DomainError(f"init vertex {v} out of range for n={g.n}")
        return [(spec, Configuration.from_vertices([v], g.n))]
    if kind == "set" and arg:
        try:
            vs = sorted({int(tok) for tok in arg.split(",")})
        except ValueError:
            raise click.UsageError(f"bad --init {spec!r}") from None
        if any(not 0 <= v < g.n for v in vs):
            raise DomainError(f"init set {vs} out of range for n={g.n}")
        return [(f"set:{','.join(map(str, vs))}", Configuration.from_vertices(vs, g.n))]
    raise click.UsageError(
        f"--init must be vertex:K, set:K1,K2,..., or all-singletons; got {spec!r}"
    )


def _graph_options(fn):
    fn = click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="Edge-list file.")(fn)
    fn = click.option("--family", default=None,
                      help="Named family NAME:ARG (cycle, star, complete, path, book).")(fn)
    fn = click.option("--gnp", default=None, help="Random graph n,p,seed.")(fn)
    return fn


def _output_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                      default="csv", show_default=True)(fn)
    fn = click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
                      help="Write output to a file instead of stdout.")(fn)
    return fn


@click.group()
def main() -> None:
    """Mixed Birth-death/death-Birth Moran process toolkit."""


def _guarded(body):
    try:
        body()
    except DomainError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(3)
    except _DOMAIN_ERRORS as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(3)
    except estimator.AbortedError as err:
        click.echo(f"aborted: {err}", err=True)
        sys.exit(4)


@main.command("exact")
@_graph_options
@click.option("--lambda", "lam_spec", required=True, help="Mixing grid (list or range).")
@click.option("--r", "r_spec", required=True, help="Fitness grid (list or range).")
@click.option("--init", "init_spec", default="all-singletons", show_default=True)
@click.option("--max-n", default=16, show_default=True,
              help="Refuse instances larger than this.")
@click.option("--rational", is_flag=True,
              help="Solve in exact rational arithmetic (small n; fp printed as p/q).")
@_output_options
def cmd_exact(graph_path, family, gnp, lam_spec, r_spec, init_spec, max_n,
              rational, fmt, out_path) -> None:
    """Exact fixation probabilities and absorption times (2^n-state solve)."""

    def body():
        g = _load_graph(graph_path, family, gnp)
        inits = _parse_inits(init_spec, g)
        lams = _parse_grid(lam_spec, "--lambda")
        rs = _parse_grid(r_spec, "--r")
        rows = []
        for lam in lams:
            for r in rs:
                params = ProcessParams(lam, r)
                sol = (exact.solve_exact(g, params, max_n=min(max_n, 10))
                       if rational else exact.solve(g, params, max_n=max_n))
                for label, cfg in inits:
                    rows.append({
                        "lambda": lam, "r": r, "init": label,
                        "fp": sol.fp_of(cfg), "abs_time": sol.abs_time_of(cfg),
                    })
        _emit(rows, ["lambda", "r", "init", "fp", "abs_time"], fmt, out_path)

    _guarded(body)


@main.command("estimate")
@_graph_options
@click.option("--lambda", "lam_spec", required=True)
@click.option("--r", "r_spec", required=True)
@click.option("--init", "init_spec", default="all-singletons", show_default=True)
@click.option("--replicates", default=10000, show_default=True)
@click.option("--max-steps", default=None, type=int,
              help="Step cutoff per replicate (default: 100x the n^4 drift bound).")
@click.option("--epsilon", default=None, type=float,
              help="Auto mode: theorem-driven budget for this accuracy (certified regimes only).")
@click.option("--seed", default=0, show_default=True)
@click.option("--strict-cutoff", is_flag=True,
              help="Abort (exit 4) if any replicate hits the cutoff.")
@_output_options
def cmd_estimate(graph_path, family, gnp, lam_spec, r_spec, init_spec, replicates,
                 max_steps, epsilon, seed, strict_cutoff, fmt, out_path) -> None:
    """Monte Carlo fixation estimates over a (lambda, r) grid."""

    def body():
        g = _load_graph(graph_path, family, gnp)
        inits = _parse_inits(init_spec, g)
        lams = _parse_grid(lam_spec, "--lambda")
        rs = _parse_grid(r_spec, "--r")
        rows = []
        for idx, (label, cfg0) in enumerate(inits):
            for i, lam in enumerate(lams):
                for j, r in enumerate(rs):
                    params = ProcessParams(lam, r)
                    cell_seed = mix64(seed, idx, i, j)
                    if epsilon is not None:
                        cfg = estimator.certified_auto_config(
                            g, params, cfg0, epsilon,
                            base_seed=cell_seed, strict_cutoff=strict_cutoff)
                    else:
                        cfg = estimator.EstimatorConfig.manual(
                            replicates, cutoff=max_steps,
                            base_seed=cell_seed, strict_cutoff=strict_cutoff)
                    report = estimator.estimate(g, cfg0, params, cfg)
                    rows.append({"init": label, "lambda": lam, "r": r,
                                 **report.as_dict()})
        fields = ["init", "lambda", "r", "fp_hat", "wilson_low", "wilson_high",
                  "fixations", "extinctions", "cutoffs", "num_runs",
                  "cutoff_steps", "mean_steps", "bracket_low", "bracket_high",
                  "aborted"]
        _emit(rows, fields, fmt, out_path)

    _guarded(body)


def _closed_form_value(g: Graph, lam: float, r: float,
                       cfg: Configuration) -> tuple[str, float]:
    """Dispatch to the applicable closed form; raises DomainError otherwise."""
    profile = degree_profile(g)
    degrees = sorted(g.degrees)
    is_cycle = profile.is_regular and profile.d_min == 2
    is_star = g.n >= 3 and degrees[-1] == g.n - 1 and degrees[-2] == 1
    if is_cycle and cfg.size == 1:
        return "cycle", closed_forms.cycle_fp(g.n, lam, r)
    if is_star:
        center = max(range(g.n), key=lambda v: g.degrees[v])
        table = closed_forms.star_fp(g.n - 1, lam, r)
        leaves = cfg.size - (1 if center in cfg else 0)
        value = (table.center_mutant[leaves] if center in cfg
                 else table.center_resident[leaves])
        return "star", value
    if r == 1 and profile.is_regular:
        return "neutral-regular", closed_forms.neutral_regular_fp(g.n, cfg.size)
    if r == 1 and profile.is_bidegreed:
        return "bidegreed-neutral", closed_forms.bidegreed_neutral_fp(g, lam, cfg)
    if r == 1 and lam == 0.5:
        return "neutral-half", closed_forms.neutral_half_lambda_fp(g.n, cfg.size)
    reasons = []
    if not profile.is_regular:
        reasons.append(f"not regular (degrees {profile.distinct_degrees})")
    if not profile.is_bidegreed:
        reasons.append("not bidegreed")
    elif r != 1:
        reasons.append("bidegreed formula needs r = 1")
    if r != 1:
        reasons.append("r != 1")
    if lam != 0.5:
        reasons.append("lambda != 1/2")
    raise DomainError("no closed form applies: " + "; ".join(reasons))


@main.command("closed-form")
@_graph_options
@click.option("--lambda", "lam_spec", required=True)
@click.option("--r", "r_spec", required=True)
@click.option("--init", "init_spec", default="all-singletons", show_default=True)
@_output_options
def cmd_closed_form(graph_path, family, gnp, lam_spec, r_spec, init_spec,
                    fmt, out_path) -> None:
    """Closed-form fixation probabilities where a formula applies."""

    def body():
        g = _load_graph(graph_path, family, gnp)
        inits = _parse_inits(init_spec, g)
        lams = _parse_grid(lam_spec, "--lambda")
        rs = _parse_grid(r_spec, "--r")
        rows = []
        for lam in lams:
            for r in rs:
                for label, cfg in inits:
                    method, value = _closed_form_value(g, lam, r, cfg)
                    rows.append({"lambda": lam, "r": r, "init": label,
                                 "method": method, "fp": value})
        _emit(rows, ["lambda", "r", "init", "method", "fp"], fmt, out_path)

    _guarded(body)


@main.command("certify")
@_graph_options
@_output_options
def cmd_certify(graph_path, family, gnp, fmt, out_path) -> None:
    """Degree profile, regularity class, and connectivity of a graph."""

    def body():
        connected = True
        if gnp is not None:
            parts = gnp.split(",")
            if len(parts) != 3:
                raise click.UsageError(f"--gnp must be n,p,seed; got {gnp!r}")
            try:
                n, p, seed = int(parts[0]), float(parts[1]), int(parts[2])
            except ValueError:
                raise click.UsageError(f"bad --gnp value {gnp!r}") from None
            edges = gnp_edges(n, p, seed)
            try:
                Graph(n, edges)
            except GraphError:
                connected = False
            degrees = [0] * n
            for u, v in edges:
                degrees[u] += 1
                degrees[v] += 1
        else:
            g = _load_graph(graph_path, family, None)
            n, degrees = g.n, list(g.degrees)
        distinct = tuple(sorted(set(degrees)))
        d_min, d_max = distinct[0], distinct[-1]
        alpha = Fraction(d_max, d_min) if d_min > 0 else None
        rows = [{
            "n": n,
            "edges": sum(degrees) // 2,
            "d_min": d_min,
            "d_max": d_max,
            "alpha": alpha if alpha is not None else "inf",
            "alpha_float": float(alpha) if alpha is not None else "inf",
            "distinct_degrees": ";".join(map(str, distinct)),
            "regular": d_min == d_max,
            "bidegreed": len(distinct) <= 2,
            "connected": connected,
        }]
        fields = ["n", "edges", "d_min", "d_max", "alpha", "alpha_float",
                  "distinct_degrees", "regular", "bidegreed", "connected"]
        _emit(rows, fields, fmt, out_path)

    _guarded(body)


if __name__ == "__main__":
    main()
