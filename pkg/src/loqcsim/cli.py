"""Command-line harness: ``loqcsim run <config>`` and ``loqcsim list``.

Config files hold one ``key = value`` pair per line. Values are Python
literals (numbers, quoted strings, lists) or ``true``/``false``; a bare word
is read as a string. ``#`` starts a comment.
"""
import argparse
import ast
import csv
import hashlib
import io
import json
import subprocess
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError
from .experiments import REGISTRY, list_experiments

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3
GLOBAL_KEYS = {"experiment", "seed", "format", "out", "threads", "budget_seconds"}
FORMATS = ("csv", "json-lines")


def _parse_value(text):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        if text and all(c.isalnum() or c in "-_." for c in text):
            return text
        raise


def parse_config(text, source="<config>"):
    """Parse flat key = value text into a dict; errors name the line."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip() if not raw.strip().startswith("#") else ""
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key.replace("_", "").replace("-", "").isalnum():
            raise ConfigError(f"{source}:{lineno}: invalid key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            out[key] = _parse_value(val)
        except (ValueError, SyntaxError):
            raise ConfigError(f"{source}:{lineno}: cannot parse value for {key!r}: {val!r}") from None
        out.setdefault("__lines__", {})[key] = lineno
    return out


def serialize_config(cfg):
    """Inverse of ``parse_config`` for flat scalar and list values."""
    lines = []
    for k, v in cfg.items():
        if isinstance(v, bool):
            lines.append(f"{k} = {'true' if v else 'false'}")
        else:
            lines.append(f"{k} = {v!r}")
    return "\n".join(lines) + "\n"


def version_string():
    """``v<version>`` plus the git-describe suffix when run from a checkout."""
    base = f"v{__version__}"
    try:
        desc = subprocess.run(["git", "describe", "--always", "--dirty"], cwd=Path(__file__).parent,
                              capture_output=True, text=True, timeout=5)
        if desc.returncode == 0 and desc.stdout.strip():
            return f"{base}-g{desc.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return base


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Sink:
    """Serialises rows to one output stream in the chosen format."""

    def __init__(self, stream, fmt, columns):
        self.stream, self.fmt, self.columns = stream, fmt, columns
        if fmt == "csv":
            self.writer = csv.writer(stream, lineterminator="\n")
            self.writer.writerow(columns)
        else:
            stream.write(json.dumps({"columns": list(columns)}) + "\n")

    def row(self, values):
        if self.fmt == "csv":
            self.writer.writerow([_fmt(v) for v in values])
        else:
            rec = {c: (v.item() if hasattr(v, "item") else v) for c, v in zip(self.columns, values)}
            self.stream.write(json.dumps(rec) + "\n")

    def footer(self, meta):
        if self.fmt == "csv":
            self.stream.write("# " + ", ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        else:
            self.stream.write(json.dumps({"footer": meta}) + "\n")


def resolve(cfg, args):
    """Merge file config with command-line overrides and validate it."""
    lines = cfg.pop("__lines__", {})
    for key in ("seed", "out", "format", "threads"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    name = cfg.get("experiment")
    if name not in REGISTRY:
        where = f" (line {lines['experiment']})" if "experiment" in lines else ""
        raise ConfigError(f"unknown or missing experiment{where}: {name!r}; see 'loqcsim list'")
    exp = REGISTRY[name]
    params = {k: v for k, v in cfg.items() if k not in GLOBAL_KEYS}
    for k in params:
        if k not in exp.params:
            raise ConfigError(f"line {lines.get(k, '?')}: unknown key {k!r} for experiment {name!r}")
    try:
        resolved = exp.resolve(params)
    except ConfigError as e:
        bad = next((k for k in params if k in str(e)), None)
        raise ConfigError(f"line {lines.get(bad, '?')}: {e}") from None
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be an integer in [0, 2^64)")
    fmt = cfg.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    threads = cfg.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        raise ConfigError("threads must be a positive integer")
    budget = cfg.get("budget_seconds")
    if budget is not None and (not isinstance(budget, (int, float)) or budget <= 0):
        raise ConfigError("budget_seconds must be positive")
    return exp, resolved, dict(seed=seed, format=fmt, out=cfg.get("out"), threads=threads, budget=budget)


def config_hash(name, params, seed):
    canon = json.dumps({"experiment": name, "params": params, "seed": seed}, sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()


def run_experiment(exp, params, opts, stream):
    """Write the table to ``stream``; returns (exit code, elapsed seconds)."""
    sink = Sink(stream, opts["format"], exp.columns)
    start = time.perf_counter()
    status = "complete"
    for values in exp.run(params, opts["seed"], opts["threads"]):
        sink.row(values)
        if opts["budget"] is not None and time.perf_counter() - start > opts["budget"]:
            status = "partial (budget exceeded)"
            break
    meta = {"seed": opts["seed"], "version": version_string(),
            "config_sha256": config_hash(exp.name, params, opts["seed"]), "status": status}
    sink.footer(meta)
    return (EXIT_OK if status == "complete" else EXIT_BUDGET), time.perf_counter() - start


def _cmd_run(args):
    try:
        path = Path(args.config)
        cfg = parse_config(path.read_text(), str(path))
        exp, params, opts = resolve(cfg, args)
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    buf = io.StringIO()
    code, elapsed = run_experiment(exp, params, opts, buf)
    if opts["out"]:
        Path(opts["out"]).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    print(f"wall_time={elapsed:.3f}s", file=sys.stderr)
    if code == EXIT_BUDGET:
        print("warning: runtime budget exceeded; output is partial", file=sys.stderr)
    return code


def _cmd_list(args):
    print(json.dumps(list_experiments(), indent=2))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="loqcsim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"loqcsim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--format", choices=FORMATS)
    r.add_argument("--threads", type=int)
    r.set_defaults(func=_cmd_run)
    ls = sub.add_parser("list", help="print the experiment catalogue as JSON")
    ls.set_defaults(func=_cmd_list)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)
