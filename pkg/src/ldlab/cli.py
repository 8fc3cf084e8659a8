"""Experiment runner: seeded, schema-validated runs with JSON records and
deterministic CSV tables.

Subcommands: ortho-verify, binom-tv, ldlr, sym-tv, cf-verify, subgraph-tv,
sweep, report.  Exit codes: 0 success, 2 a property check failed, 3 config
error, 4 budget exceeded.

Config files are flat ``key = value`` text (# comments allowed); every kind
has a typed schema below.  Identical (config, seed) reproduce identical CSV
bytes; wall time lives only in the JSON record.
"""

import argparse
import glob as globmod
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, binomtv, ldlr, models, subgraph, symstats
from .charfun import random_poly, verify_cf_regimes
from .errors import BudgetError, ConfigError
from .orthopoly import (
    make_krawtchouk_basis,
    make_weight_law,
    verify_hermite_derivative,
    verify_hermite_orthonormality,
    verify_krawtchouk_bound,
    verify_krawtchouk_orthonormality,
)
from .rng import stream_generator

_INT, _FLOAT, _STR, _INTS, _FLOATS = "int", "float", "str", "ints", "floats"
_REQUIRED = object()

SCHEMAS = {
    "ortho-verify": {
        "n_list": (_INTS, [10, 20, 50, 128]),
        "gamma_list": (_FLOATS, [0.3, 0.5]),
        "amax": (_INT, 12),
        "tol": (_FLOAT, 1e-10),
        "bound_constant": (_FLOAT, 3.0),
        "bound_n": (_INT, 128),
    },
    "binom-tv": {
        "n": (_INT, 128),
        "gamma": (_FLOAT, 0.3),
        "planted": (_STR, "biased:0.05"),
        "eps_list": (_FLOATS, [0.1, 0.3, 0.5, 0.7, 0.9]),
        "D": (_INT, 0),  # 0 -> ceil((8/eps) ln n) per eps
        "tau": (_FLOAT, 0.0),  # 0 -> 2 sqrt(ln n)
    },
    "ldlr": {
        "domain": (_STR, _REQUIRED),
        "n": (_INT, _REQUIRED),
        "D": (_INT, 4),
        "samples": (_INT, 4096),
        "gamma": (_FLOAT, 0.3),
        "planted": (_STR, ""),
        "chunk": (_INT, 256),
    },
    "sym-tv": {
        "n": (_INT, 2000),
        "k": (_INT, 3),
        "eps": (_FLOAT, 0.5),
        "planted": (_STR, "quadrature:5"),
        "samples": (_INT, 20000),
        "radius": (_FLOAT, 2.0),
        "n_dirs": (_INT, 32),
        "n_radii": (_INT, 64),
        "bins": (_INT, 100),
        "chunk": (_INT, 1024),
    },
    "cf-verify": {
        "corpus": (_INT, 1000),
        "degree": (_INT, 4),
        "regime": (_STR, "1"),
        "big_c": (_FLOAT, 3.0),
        "c2": (_FLOAT, 1.0),
        "c3": (_FLOAT, 2.0),
    },
    "subgraph-tv": {
        "n": (_INT, 400),
        "patterns": (_STR, "edge,2-path,triangle"),
        "planted": (_STR, "spike:auto:auto"),
        "eps": (_FLOAT, 0.3),
        "samples": (_INT, 20000),
        "bins": (_INT, 50),
        "chunk": (_INT, 128),
    },
}
SCHEMAS["sweep"] = {
    "kind": (_STR, _REQUIRED),
    "vary": (_STR, _REQUIRED),
    "values": (_STR, _REQUIRED),  # comma list, parsed by the varied key's type
}
SCHEMAS["report"] = {"records": (_STR, "*.json")}


def parse_config_text(text):
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        raw[key.strip()] = value.strip()
    return raw


def _parse_value(kind, text):
    try:
        if kind == _INT:
            return int(text)
        if kind == _FLOAT:
            return float(text)
        if kind == _INTS:
            return [int(t) for t in text.split(",") if t.strip()]
        if kind == _FLOATS:
            return [float(t) for t in text.split(",") if t.strip()]
        return text
    except ValueError as exc:
        raise ConfigError(f"bad {kind} value {text!r}") from exc


def validate_config(experiment, raw):
    if experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment kind {experiment!r}")
    schema = SCHEMAS[experiment]
    # sweep configs carry keys of the swept kind as well
    extra_ok = SCHEMAS.get(raw.get("kind", ""), {}) if experiment == "sweep" else {}
    cfg = {}
    for key, value in raw.items():
        if key in schema:
            cfg[key] = _parse_value(schema[key][0], value)
        elif key in extra_ok:
            cfg[key] = _parse_value(extra_ok[key][0], value)
        else:
            raise ConfigError(f"unknown key {key!r} for {experiment}")
    for key, (kind, default) in schema.items():
        if key not in cfg:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {key!r}")
            cfg[key] = default
    return cfg


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(path, fieldnames, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[k]) for k in fieldnames) + "\n")
    return path


def _record_path(outdir, experiment, cfg, seed):
    digest = hashlib.sha256(
        json.dumps({"experiment": experiment, "cfg": cfg, "seed": seed}, sort_keys=True, default=str).encode()
    ).hexdigest()[:10]
    return os.path.join(outdir, f"record-{experiment}-{digest}.json")


# ---------------------------------------------------------------------------
# experiment bodies: each returns (results dict, tables dict, ok flag)


def _run_ortho_verify(cfg, seed):
    rows = []
    worst = 0.0
    for n in cfg["n_list"]:
        for gamma in cfg["gamma_list"]:
            amax = min(cfg["amax"], n)
            basis = make_krawtchouk_basis(n, gamma, kmax=amax)
            law = make_weight_law(n, gamma)
            dev = verify_krawtchouk_orthonormality(basis, law, amax=amax)
            worst = max(worst, dev)
            rows.append({"n": n, "gamma": gamma, "amax": amax, "max_dev": dev})
    hdev = verify_hermite_orthonormality(cfg["amax"])
    hder = verify_hermite_derivative(min(cfg["amax"], 12))
    nb = cfg["bound_n"]
    basis = make_krawtchouk_basis(nb, cfg["gamma_list"][0], kmax=max(2, nb // 2))
    grid = np.linspace(-(nb ** (1 / 6)) / 2, (nb ** (1 / 6)) / 2, 41)
    bound = verify_krawtchouk_bound(basis, max(1, nb // 2), grid, cfg["bound_constant"])
    ok = (
        worst <= cfg["tol"]
        and hdev <= cfg["tol"]
        and hder <= 1e-6
        and bound["within_constant"]
    )
    results = {
        "max_krawtchouk_dev": worst,
        "hermite_orthonormality_dev": hdev,
        "hermite_derivative_relerr": hder,
        "pointwise_bound_max_ratio": bound["max_ratio"],
        "pass": ok,
    }
    return results, {"orthonormality": (["n", "gamma", "amax", "max_dev"], rows)}, ok


def _parse_boolean_planted(text, n, gamma):
    if text.startswith("biased:"):
        return models.biased_product_spec(n, gamma, float(text.split(":", 1)[1]))
    if text.startswith("window:"):
        lo, hi = text.split(":", 1)[1].split(":")
        return models.weight_conditioned_spec(n, gamma, range(int(lo), int(hi) + 1))
    raise ConfigError(f"unknown boolean planted {text!r}")


def _run_binom_tv(cfg, seed):
    n, gamma = cfg["n"], cfg["gamma"]
    spec = _parse_boolean_planted(cfg["planted"], n, gamma)
    pi = models.planted_weight_law(spec)
    basis = make_krawtchouk_basis(n, gamma, kmax=n)
    nu = make_weight_law(n, gamma)
    tau = cfg["tau"] if cfg["tau"] > 0 else None
    rows = []
    ok = True
    prev_bound = math.inf
    for eps in cfg["eps_list"]:
        D = cfg["D"] if cfg["D"] > 0 else min(n, math.ceil(8.0 / eps * math.log(n)))
        delta = binomtv.chi2_low_degree(pi, basis, D)
        cert = binomtv.certified_tv_bound(pi, eps, D, basis, tau=tau)
        tv = binomtv.exact_tv(nu, models.noisy_weight_law(pi, eps))
        sound = cert.tv_bound >= tv - 1e-10
        monotone = cert.tv_bound <= prev_bound + 1e-12
        ok = ok and sound and monotone
        prev_bound = cert.tv_bound
        rows.append(
            {
                "n": n,
                "gamma": gamma,
                "eps": eps,
                "D": D,
                "delta": delta,
                "bound": cert.tv_bound,
                "exact_tv": tv,
                "mass_dropped": cert.mass_dropped,
                "seed": seed,
            }
        )
    results = {
        "rows": len(rows),
        "max_bound": max(r["bound"] for r in rows),
        "max_exact_tv": max(r["exact_tv"] for r in rows),
        "sound_and_monotone": ok,
    }
    fields = ["n", "gamma", "eps", "D", "delta", "bound", "exact_tv", "mass_dropped", "seed"]
    return results, {"binom_tv": (fields, rows)}, ok


def _vector_sampler(spec, eps, chunk):
    def sampler(count, seed):
        for i, (_, payload) in enumerate(
            models.sample_chunks(spec, count, seed, chunk=chunk)
        ):
            if eps > 0:
                payload = models.apply_ou_noise(payload, eps, seed, stream=f"ou|{i}")
            yield payload

    return sampler


def _run_ldlr(cfg, seed):
    domain, n, D = cfg["domain"], cfg["n"], cfg["D"]
    if domain == "boolean":
        spec = _parse_boolean_planted(cfg["planted"] or "biased:0.05", n, cfg["gamma"])
        pi = models.planted_weight_law(spec)
        basis = make_krawtchouk_basis(n, cfg["gamma"], kmax=min(n, max(D, 12)))
        est = ldlr.chi2_sym_boolean(pi, basis, D)
    elif domain == "vector":
        text = cfg["planted"] or "quadrature:3"
        if text.startswith("quadrature:"):
            spec = models.quadrature_product_spec(int(text.split(":")[1]), n)
        elif text.startswith("spiked:"):
            spec = models.spiked_mean_spec(n, float(text.split(":")[1]))
        elif text == "null":
            spec = models.gauss_vector_null(n)
        else:
            raise ConfigError(f"unknown vector planted {text!r}")
        sampler = _vector_sampler(spec, 0.0, cfg["chunk"])
        est = ldlr.chi2_sym_gaussian(sampler, D, cfg["samples"], seed)
    elif domain == "wigner":
        text = cfg["planted"] or "spike:auto:auto"
        if text == "null":
            spec = models.gauss_wigner_null(n)
        elif text.startswith("spike:"):
            _, lam_s, ell_s = text.split(":")
            lam = n**0.3 if lam_s == "auto" else float(lam_s)
            ell = max(1, round(n**0.4)) if ell_s == "auto" else int(ell_s)
            spec = models.wigner_spike_spec(n, lam, ell)
        else:
            raise ConfigError(f"unknown wigner planted {text!r}")

        def sampler(count, sd):
            for _, payload in models.sample_chunks(spec, count, sd, chunk=cfg["chunk"]):
                yield payload

        est = ldlr.chi2_wigner_mc(sampler, D, cfg["samples"], seed)
    else:
        raise ConfigError(f"unknown domain {cfg['domain']!r}")
    rows = [
        {"index": str(desc), "estimate": est_i, "stderr": se_i}
        for desc, est_i, se_i in est.coeffs.entries
    ]
    results = {
        "chi2": est.chi2,
        "stderr": est.stderr,
        "D": est.D,
        "method": est.method,
        "lower_bound_only": est.lower_bound_only,
    }
    return results, {"coeffs": (["index", "estimate", "stderr"], rows)}, True


def _run_sym_tv(cfg, seed):
    n, k, eps = cfg["n"], cfg["k"], cfg["eps"]
    text = cfg["planted"]
    if text.startswith("quadrature:"):
        spec = models.quadrature_product_spec(int(text.split(":")[1]), n)
    elif text.startswith("spiked:"):
        spec = models.spiked_mean_spec(n, float(text.split(":")[1]))
    else:
        raise ConfigError(f"unknown vector planted {text!r}")
    null = models.gauss_vector_null(n)
    count, chunk = cfg["samples"], cfg["chunk"]

    def fk_samples(src_spec, noise_eps, sd):
        out = []
        for i, (_, payload) in enumerate(models.sample_chunks(src_spec, count, sd, chunk=chunk)):
            if noise_eps > 0:
                payload = models.apply_ou_noise(payload, noise_eps, sd, stream=f"ou|{i}")
            out.append(symstats.eval_Fk_batch(payload, k))
        return np.concatenate(out)

    z_null = fk_samples(null, 0.0, seed)
    z_planted = fk_samples(spec, eps, seed + 1)
    xis, dirs, radii = symstats.radial_grid(
        k, cfg["radius"], cfg["n_dirs"], cfg["n_radii"], seed=seed
    )
    cf_null, se_null = symstats.empirical_cf(z_null, xis)
    cf_planted, se_planted = symstats.empirical_cf(z_planted, xis)
    match = symstats.frequency_match_diag(cf_null, cf_planted, xis, se_null, se_planted)
    decay = symstats.fourier_decay_diag(z_null, k, cfg["radius"], 1.0, seed=seed)
    hist = (
        symstats.tv_histogram(z_null[:, : min(k, 3)], z_planted[:, : min(k, 3)], cfg["bins"])
        if k <= 3
        else None
    )
    cf_rows = []
    for i, xi in enumerate(xis):
        row = {f"xi{d}": float(xi[d]) for d in range(k)}
        row.update(
            re_null=float(cf_null[i].real),
            im_null=float(cf_null[i].imag),
            stderr_null=float(se_null[i]),
            re_planted=float(cf_planted[i].real),
            im_planted=float(cf_planted[i].imag),
            stderr_planted=float(se_planted[i]),
        )
        cf_rows.append(row)
    results = {
        "sup_cf_diff": match["sup_diff"],
        "sup_cf_stderr": match["stderr_at_sup"],
        "decay_fitted_a": decay["fitted_a"],
        "decay_fitted_b": decay["fitted_b"],
    }
    if hist is not None:
        results.update(tv=hist["tv"], tv_bias_floor=hist["bias_floor"], tv_stderr=hist["stderr"])
    fields = [f"xi{d}" for d in range(k)] + [
        "re_null", "im_null", "stderr_null", "re_planted", "im_planted", "stderr_planted",
    ]
    return results, {"cf_grid": (fields, cf_rows)}, True


def _run_cf_verify(cfg, seed):
    rng = stream_generator(seed, "cf-corpus")
    k = cfg["degree"]
    rows = []
    ok = True
    for i in range(cfg["corpus"]):
        if cfg["regime"] == "1":
            var = rng.uniform(0, 9.0 ** (-k))
        elif cfg["regime"] == "3":
            var = float(k) ** (cfg["big_c"] * k) * rng.uniform(1.0, 100.0)
        else:
            var = math.exp(rng.uniform(math.log(9.0 ** (-k)), math.log(float(k) ** (cfg["big_c"] * k))))
        p = random_poly(rng, k, var)
        rep = verify_cf_regimes(p, big_c=cfg["big_c"], c2=cfg["c2"], c3=cfg["c3"])
        ok = ok and (rep.passed or not rep.converged)
        row = {f"c{j}": float(c) for j, c in enumerate(p.coeffs)}
        row.update(
            variance=rep.variance, regime=rep.regime, bound=rep.bound,
            observed=rep.observed, passed=int(rep.passed),
        )
        rows.append(row)
    fields = [f"c{j}" for j in range(k + 1)] + ["variance", "regime", "bound", "observed", "passed"]
    results = {
        "corpus": len(rows),
        "violations": sum(1 for r in rows if not r["passed"]),
        "pass": ok,
    }
    return results, {"cf_regimes": (fields, rows)}, ok


def _run_subgraph_tv(cfg, seed):
    n, eps = cfg["n"], cfg["eps"]
    named = {
        "edge": subgraph.EDGE,
        "2-path": subgraph.PATH2,
        "triangle": subgraph.TRIANGLE,
        "4-cycle": subgraph.CYCLE4,
    }
    patterns = []
    for name in cfg["patterns"].split(","):
        name = name.strip()
        if name in named:
            patterns.append(named[name])
        elif name.startswith("file:"):
            patterns.append(subgraph.pattern_from_file(name[5:]))
        else:
            raise ConfigError(f"unknown pattern {name!r}")
    text = cfg["planted"]
    if text == "null":
        spec = models.gauss_wigner_null(n)
    elif text.startswith("spike:"):
        _, lam_s, ell_s = text.split(":")
        lam = n**0.3 if lam_s == "auto" else float(lam_s)
        ell = max(1, round(n**0.4)) if ell_s == "auto" else int(ell_s)
        spec = models.wigner_spike_spec(n, lam, ell)
    else:
        raise ConfigError(f"unknown wigner planted {text!r}")
    count, chunk = cfg["samples"], cfg["chunk"]
    null_spec = models.gauss_wigner_null(n)
    rows = []
    results = {}
    for pat in patterns:
        planted_vals = np.empty(count)
        null_vals = np.empty(count)
        pos = 0
        for i, (_, payload) in enumerate(models.sample_chunks(spec, count, seed, chunk=chunk)):
            noisy = models.apply_ou_noise(payload, eps, seed, stream=f"ou|{pat.digest()}|{i}")
            planted_vals[pos : pos + payload.shape[0]] = subgraph.chi_theta_batch(noisy, pat)
            pos += payload.shape[0]
        pos = 0
        for _, payload in models.sample_chunks(null_spec, count, seed + 1, chunk=chunk):
            null_vals[pos : pos + payload.shape[0]] = subgraph.chi_theta_batch(payload, pat)
            pos += payload.shape[0]
        hist = symstats.tv_histogram(null_vals, planted_vals, cfg["bins"])
        label = pat.name or pat.digest()
        results[f"tv_{label}"] = hist["tv"]
        results[f"tv_{label}_bias_floor"] = hist["bias_floor"]
        for stat, value, stderr in [
            ("tv", hist["tv"], hist["stderr"]),
            ("tv_bias_floor", hist["bias_floor"], 0.0),
            ("mean_noisy_planted", float(planted_vals.mean()), float(planted_vals.std(ddof=1) / math.sqrt(count))),
            ("var_noisy_planted", float(planted_vals.var(ddof=1)), 0.0),
        ]:
            rows.append(
                {
                    "pattern": label,
                    "pattern_hash": pat.digest(),
                    "n": n,
                    "eps": eps,
                    "statistic": stat,
                    "value": value,
                    "stderr": stderr,
                }
            )
    fields = ["pattern", "pattern_hash", "n", "eps", "statistic", "value", "stderr"]
    return results, {"subgraph_tv": (fields, rows)}, True


_RUNNERS = {
    "ortho-verify": _run_ortho_verify,
    "binom-tv": _run_binom_tv,
    "ldlr": _run_ldlr,
    "sym-tv": _run_sym_tv,
    "cf-verify": _run_cf_verify,
    "subgraph-tv": _run_subgraph_tv,
}


def run(experiment, cfg, seed, outdir, fmt="csv"):
    """Execute one experiment; write the record and tables; return (record, ok)."""
    os.makedirs(outdir, exist_ok=True)
    t0 = time.perf_counter()
    if experiment == "sweep":
        results, tables, ok = _run_sweep(cfg, seed, outdir, fmt)
    else:
        results, tables, ok = _RUNNERS[experiment](cfg, seed)
    wall = time.perf_counter() - t0
    record = {
        "experiment": experiment,
        "config": {k: (v if not isinstance(v, list) else list(v)) for k, v in cfg.items()},
        "seed": seed,
        "results": results,
        "wall_time_s": wall,
        "version": __version__,
    }
    record_path = _record_path(outdir, experiment, cfg, seed)
    with open(record_path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=str)
    stem = os.path.splitext(record_path)[0]
    for name, (fields, rows) in tables.items():
        if fmt == "json":
            with open(f"{stem}-{name}.json", "w") as fh:
                json.dump(rows, fh, indent=2, sort_keys=True)
        else:
            write_table(f"{stem}-{name}.csv", fields, rows)
    return record, record_path, ok


def _run_sweep(cfg, seed, outdir, fmt):
    kind = cfg["kind"]
    if kind not in _RUNNERS:
        raise ConfigError(f"cannot sweep over {kind!r}")
    vary = cfg["vary"]
    schema = SCHEMAS[kind]
    if vary not in schema:
        raise ConfigError(f"{vary!r} is not a key of {kind}")
    vtype = schema[vary][0]
    values = [_parse_value(vtype, t) for t in cfg["values"].split(";")]
    base = {k: v for k, v in cfg.items() if k in schema}
    all_ok = True
    summary = []
    for value in values:
        sub = dict(base)
        sub[vary] = value
        sub = validate_config(kind, {k: str(v) if not isinstance(v, list) else ",".join(map(str, v)) for k, v in sub.items()})
        record, path, ok = run(kind, sub, seed, outdir, fmt)
        all_ok = all_ok and ok
        row = {"experiment": kind, vary: value, "record": os.path.basename(path)}
        for key, val in record["results"].items():
            if isinstance(val, (int, float)) and not isinstance(val, bool):
                row[key] = val
        summary.append(row)
    fields = sorted({k for row in summary for k in row}, key=lambda s: (s != "experiment", s != vary, s))
    for row in summary:
        for k in fields:
            row.setdefault(k, "")
    return {"runs": len(summary), "all_ok": all_ok}, {"sweep": (fields, summary)}, all_ok


def report(records_glob, outdir=None):
    """Aggregate record JSONs into one table; malformed files listed, not fatal."""
    paths = sorted(globmod.glob(records_glob))
    rows = []
    malformed = []
    for path in paths:
        try:
            with open(path) as fh:
                rec = json.load(fh)
            row = {
                "experiment": rec["experiment"],
                "n": rec.get("config", {}).get("n", ""),
                "eps": rec.get("config", {}).get("eps", ""),
                "seed": rec.get("seed", ""),
                "record": os.path.basename(path),
            }
            for key, val in rec.get("results", {}).items():
                if isinstance(val, (int, float)) and not isinstance(val, bool):
                    row[key] = val
            rows.append(row)
        except (json.JSONDecodeError, KeyError, OSError) as exc:
            malformed.append((path, str(exc)))
    rows.sort(key=lambda r: (str(r["experiment"]), str(r["n"]), str(r["eps"])))
    return rows, malformed


def main(argv=None):
    parser = argparse.ArgumentParser(prog="ldlab", description=__doc__)
    parser.add_argument("experiment", choices=list(SCHEMAS))
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=0,
                        help="recorded worker budget; results never depend on it")
    parser.add_argument("--out", default="runs")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    args = parser.parse_args(argv)
    try:
        raw = {}
        if args.config:
            with open(args.config) as fh:
                raw = parse_config_text(fh.read())
        if args.experiment == "report":
            cfg = validate_config("report", raw)
            rows, malformed = report(cfg["records"])
            if rows:
                fields = sorted({k for row in rows for k in row})
                for row in rows:
                    for k in fields:
                        row.setdefault(k, "")
                os.makedirs(args.out, exist_ok=True)
                path = write_table(os.path.join(args.out, "report.csv"), fields, rows)
                print(f"{len(rows)} records -> {path}")
                for row in rows:
                    print("  ", row["experiment"], row["record"])
            else:
                print("0 records")
            for path, err in malformed:
                print(f"malformed: {path}: {err}", file=sys.stderr)
            return 0
        cfg = validate_config(args.experiment, raw)
        record, path, ok = run(args.experiment, cfg, args.seed, args.out, args.format)
        for key, val in sorted(record["results"].items()):
            print(f"{key} = {val}")
        print(f"record: {path}")
        return 0 if ok else 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
