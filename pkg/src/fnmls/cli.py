"""Command line front end.

Subcommands ``lengths``, ``compare``, ``distort`` and ``sweep``.  Exit codes:
0 success, 2 configuration or parse error, 3 precondition or regime error,
4 failed numerical self-check.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._io import atomic_write, fmt
from .errors import (ConsistencyError, DomainError, FNError, InconsistentDataError, PreconditionError,
                     SchemaError)
from .experiments import check_sweep, delta_sweep, epsilon_sweep, loglog_slope, perturb_to_epsilon, random_direction
from .mapbuild.composite import MODES, compose_f, continuity_residuals
from .mapbuild.distortion import distortion
from .mapbuild.smoothing import smooth
from .surface import bounded_word_spectrum, curve_length, mls_epsilon, mls_epsilon_from_lengths, nine_curves
from .surface_io import load_surface

REPORT_SCHEMA = "fnmls-report/1"
CONTINUITY_TOL = 1e-9


class ConfigError(FNError, ValueError):
    """Bad command line configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    surface0: str
    surface1: str = None
    curves: str = "nine"
    samples: int = 1000
    seed: int = 0
    delta: tuple = ()
    sweep: tuple = ()
    out: str = None
    mode: str = "relative"
    epsilon: float = 1e-3

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("--samples must be >= 1")
        parse_curves(self.curves)
        if self.mode not in MODES:
            raise ConfigError(f"--mode must be one of {MODES}")
        for name in ("sweep", "delta"):
            vals = getattr(self, name)
            if len(vals) > 1:
                try:
                    check_sweep(vals)
                except DomainError as exc:
                    raise ConfigError(f"--{name}: {exc}") from None
            elif any(not v > 0 for v in vals):
                raise ConfigError(f"--{name} values must be positive")

    def digest(self) -> str:
        """Hash of the configuration and of the surface files' contents."""
        h = hashlib.sha256()
        for p in (self.surface0, self.surface1):
            if p:
                with open(p, "rb") as fh:
                    h.update(fh.read())
        cfg = {k: getattr(self, k) for k in ("curves", "samples", "seed", "delta", "sweep", "mode", "epsilon")}
        h.update(json.dumps(cfg, sort_keys=True).encode())
        return h.hexdigest()[:16]


def parse_curves(sel: str):
    if sel in ("cuffs", "nine"):
        return sel, None
    if sel.startswith("words:"):
        try:
            n = int(sel[6:])
        except ValueError:
            raise ConfigError(f"bad curve set {sel!r}") from None
        if not 1 <= n <= 10:
            raise ConfigError("words:L needs 1 <= L <= 10")
        return "words", n
    raise ConfigError(f"curve set must be cuffs, nine or words:L, got {sel!r}")


def _floats(text):
    if text is None or text == "":
        return ()
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None


def curve_table(fn, sel: str):
    """``(ids, words, lengths, valid)`` for a curve-set selector."""
    kind, n = parse_curves(sel)
    if kind == "words":
        words, lengths, masks = bounded_word_spectrum(fn, n)
        ids, out_w, out_l, out_m = [], [], [], []
        for wl, ll, ml in zip(words, lengths, masks):
            for w, length, m in zip(wl, ll, ml):
                ids.append(f"w{len(ids)}")
                out_w.append(tuple(int(x) for x in w))
                out_l.append(float(length))
                out_m.append(bool(m))
        return ids, out_w, np.array(out_l), np.array(out_m)
    system = nine_curves(fn.graph)
    if kind == "cuffs":
        words = [w.letters for w in system.gammas]
        ids = system.labels()[:len(words)]
    else:
        words = [w.letters for w in system.all_words()]
        ids = system.labels()
    lengths = np.array([curve_length(fn, w) for w in words])
    return ids, words, lengths, np.ones(len(words), dtype=bool)


def _header(cfg: ExperimentConfig) -> str:
    return f"# schema={REPORT_SCHEMA} seed={cfg.seed} config={cfg.digest()} version={__version__}\n"


def _csv(cfg, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(_header(cfg))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _emit(cfg, name, text):
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        atomic_write(os.path.join(cfg.out, name), text)
    else:
        sys.stdout.write(text)


def _word_str(w) -> str:
    return " ".join(str(x) for x in w)


def cmd_lengths(cfg: ExperimentConfig) -> str:
    fn = load_surface(cfg.surface0)
    ids, words, lengths, _ = curve_table(fn, cfg.curves)
    text = _csv(cfg, ("curve_id", "word", "length"),
                ((i, _word_str(w), float(x)) for i, w, x in zip(ids, words, lengths)))
    _emit(cfg, "lengths.csv", text)
    return text


def compare_epsilon(fn0, fn1, sel: str) -> float:
    """The MLS distance the ``compare`` command reports."""
    kind, _ = parse_curves(sel)
    if kind == "words":
        _, _, l0, m0 = curve_table(fn0, sel)
        _, _, l1, m1 = curve_table(fn1, sel)
        m = m0 & m1
        return mls_epsilon_from_lengths(l0[m], l1[m])
    system = nine_curves(fn0.graph)
    words = system.gammas if kind == "cuffs" else system.all_words()
    return mls_epsilon(fn0, fn1, words)


def cmd_compare(cfg: ExperimentConfig) -> str:
    if not cfg.surface1:
        raise ConfigError("compare needs --surface1")
    fn0, fn1 = load_surface(cfg.surface0), load_surface(cfg.surface1)
    if fn0.graph != fn1.graph:
        raise PreconditionError("surfaces are marked by different pants graphs")
    eps = compare_epsilon(fn0, fn1, cfg.curves)
    ids, words, l0, m0 = curve_table(fn0, cfg.curves)
    _, _, l1, m1 = curve_table(fn1, cfg.curves)
    rows = []
    for i, w, a, b, ok in zip(ids, words, l0, l1, m0 & m1):
        rows.append((i, _word_str(w), float(a), float(b), float(b / a) if ok else "nan"))
    _emit(cfg, "compare.csv", _csv(cfg, ("curve_id", "word", "length0", "length1", "ratio"), rows))
    summary = _header(cfg) + f"curves: {cfg.curves}\ncount: {len(rows)}\nepsilon: {fmt(eps)}\n"
    _emit(cfg, "compare_summary.txt", summary)
    return summary


def _check_continuity(f):
    res = continuity_residuals(f)
    worst = max(res.values())
    if worst > CONTINUITY_TOL:
        raise ConsistencyError(f"edge-continuity residual {worst:.3g} exceeds {CONTINUITY_TOL}")
    return res


def cmd_distort(cfg: ExperimentConfig) -> str:
    fn0 = load_surface(cfg.surface0)
    if cfg.sweep:
        rows = epsilon_sweep(fn0, cfg.sweep, cfg.samples, cfg.seed, cfg.mode, direction_seed=cfg.seed)
        table = [(r.epsilon, r.sup_deviation, r.sup, r.inf, r.prefactor) for r in rows]
        text = _csv(cfg, ("epsilon", "sup_deviation", "sup_ratio", "inf_ratio", "prefactor"), table)
        _emit(cfg, "epsilon_sweep.csv", text)
        if len(rows) > 1:
            slope = loglog_slope([r.epsilon for r in rows], [r.sup_deviation for r in rows])
            _emit(cfg, "epsilon_sweep_summary.txt", _header(cfg) + f"loglog_slope: {fmt(slope)}\n")
        return text
    if not cfg.surface1:
        raise ConfigError("distort needs --surface1 (or --sweep)")
    fn1 = load_surface(cfg.surface1)
    f = compose_f(fn0, fn1, cfg.mode)
    _check_continuity(f)
    F = f
    if cfg.delta:
        if len(cfg.delta) != 1:
            raise ConfigError("distort takes a single --delta")
        F = smooth(f, cfg.delta[0])
    rep = distortion(F, cfg.samples, cfg.seed)
    _emit(cfg, "distortion.csv", rep.to_csv())
    _emit(cfg, "distortion_summary.txt", rep.summary())
    return rep.summary()


def cmd_sweep(cfg: ExperimentConfig) -> str:
    if not cfg.sweep and not cfg.delta:
        raise ConfigError("sweep needs --sweep and/or --delta lists")
    fn0 = load_surface(cfg.surface0)
    out = []
    if cfg.sweep:
        rows = epsilon_sweep(fn0, cfg.sweep, cfg.samples, cfg.seed, cfg.mode, direction_seed=cfg.seed)
        table = [(r.epsilon, r.sup_deviation, r.sup, r.inf, r.prefactor) for r in rows]
        text = _csv(cfg, ("epsilon", "sup_deviation", "sup_ratio", "inf_ratio", "prefactor"), table)
        out.append(("epsilon_sweep.csv", text))
    if cfg.delta:
        if cfg.surface1:
            fn1 = load_surface(cfg.surface1)
        else:
            fn1 = perturb_to_epsilon(fn0, cfg.epsilon, random_direction(fn0, cfg.seed))
        eps = mls_epsilon_from_lengths(*(np.array([curve_length(fn, w) for w in nine_curves(fn0.graph).all_words()])
                                         for fn in (fn0, fn1)))
        rows = delta_sweep(fn0, fn1, cfg.delta, cfg.samples, cfg.seed, cfg.mode)
        table = [(r.delta, r.c0, r.c1, r.lipschitz, r.c0 / (r.lipschitz * r.delta), r.c1_prefactor(eps))
                 for r in rows]
        text = _csv(cfg, ("delta", "c0", "c1", "lipschitz", "c0_over_L_delta", "c1_over_delta_plus_eps"), table)
        out.append(("delta_sweep.csv", text))
    for name, text in out:
        _emit(cfg, name, text)
    return "".join(t for _, t in out)


COMMANDS = {"lengths": cmd_lengths, "compare": cmd_compare, "distort": cmd_distort, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fnmls", description="Fenchel-Nielsen surfaces: lengths and near-isometries.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--surface0", required=True)
        s.add_argument("--surface1")
        s.add_argument("--curves", default="nine", help="cuffs | nine | words:L")
        s.add_argument("--samples", type=int, default=1000)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--delta", help="smoothing radius (comma list for sweep)")
        s.add_argument("--sweep", help="comma list of decreasing epsilons")
        s.add_argument("--epsilon", type=float, default=1e-3, help="target epsilon for the delta sweep")
        s.add_argument("--mode", default="relative", choices=MODES)
        s.add_argument("--out", help="output directory (default: stdout)")
    return p


def config_from_args(ns) -> ExperimentConfig:
    return ExperimentConfig(surface0=ns.surface0, surface1=ns.surface1, curves=ns.curves, samples=ns.samples,
                            seed=ns.seed, delta=_floats(ns.delta), sweep=_floats(ns.sweep), out=ns.out,
                            mode=ns.mode, epsilon=ns.epsilon)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        COMMANDS[ns.command](cfg)
    except (ConfigError, SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConsistencyError, InconsistentDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
