"""Command-line front end.

Subcommands: compute, verify, enumerate, search, report.  Reports are JSONL
(one object per line, schema_version "1"); payloads are byte-deterministic
given the same job config and seed, regardless of worker count.  Exit codes:
0 success, 1 input error, 2 violations or candidates found.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from .algebra import build_algebra, parse_spec
from .enumeration import enumerate_modules
from .errors import HomlabError, SpecError
from .homology import (
    ext_profile,
    evaluation_report,
    linear_dual,
    orthogonality_profile,
    tensor_dim,
    transpose,
)
from .lab import (
    PREDICATE_IDS,
    EnumerationConfig,
    SearchConfig,
    run_suite,
    search_counterexample,
)
from .modules import regular_module
from .serialize import (
    algebra_to_dict,
    canonical_json,
    content_hash,
    module_from_dict,
    module_to_dict,
    module_content_hash,
    module_payload,
)

SCHEMA_VERSION = "1"


@dataclass
class JobConfig:
    command: str
    subject: str | None = None
    algebra_path: str | None = None
    m_path: str | None = None
    n_path: str | None = None
    predicates: list = field(default_factory=list)
    max_dim: int = 3
    bound: int = 6
    exhaustive: bool | None = None
    budget: int = 1 << 20
    seed: int = 0
    workers: int = 1
    out: str | None = None
    num_algebras: int = 4
    algebra_kind: str = "quiver_rsz"
    extra_samples: int = 0
    extra_sample_dim: int | None = None

    def echo(self):
        return {
            "command": self.command,
            "subject": self.subject,
            "algebra": self.algebra_path,
            "m": self.m_path,
            "n": self.n_path,
            "predicates": list(self.predicates),
            "max_dim": self.max_dim,
            "bound": self.bound,
            "exhaustive": self.exhaustive,
            "budget": self.budget,
            "seed": self.seed,
            "workers": self.workers,
            "extra_samples": self.extra_samples,
            "extra_sample_dim": self.extra_sample_dim,
        }


def _load_algebra(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise SpecError(f"cannot read algebra file {path}: {e}") from None
    try:
        return build_algebra(parse_spec(text))
    except SpecError as e:
        raise SpecError(f"{path}: {e}") from None


def _load_module(path, algebra=None):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise SpecError(f"cannot read module file {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON: {e.msg}", e.lineno, e.colno) from None
    base = os.path.dirname(os.path.abspath(path))
    try:
        return module_from_dict(
            doc, algebra=algebra, resolve_path=lambda ref: os.path.join(base, ref)
        )
    except SpecError as e:
        raise SpecError(f"{path}: {e}") from None


def _record(cfg: JobConfig, algebra_hash, payload, caveats=()):
    return {
        "schema_version": SCHEMA_VERSION,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "job": cfg.echo(),
        "algebra_hash": algebra_hash,
        "payload": payload,
        "caveats": sorted(set(caveats)),
    }


def _emit(records, out_path):
    lines = []
    for rec in records:
        lines.append(canonical_json(rec))
    text = "\n".join(lines) + ("\n" if lines else "")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_witnesses(records, out_path):
    """Violation witness modules become standalone files named by content hash."""
    if not out_path:
        return
    outdir = os.path.dirname(os.path.abspath(out_path))
    for rec in records:
        payload = rec.get("payload", {})
        for witness in payload.get("witnesses", []):
            mod = witness.get("module")
            if mod is None:
                continue
            h = witness.get("module_hash", content_hash(mod))
            path = os.path.join(outdir, f"witness-{h}.json")
            if not os.path.exists(path):
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(canonical_json(mod) + "\n")


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_compute(cfg: JobConfig):
    algebra = _load_algebra(cfg.algebra_path) if cfg.algebra_path else None
    op = cfg.subject
    if not cfg.m_path:
        raise SpecError("compute needs --m <module file>")
    if op == "tensor":
        # --m names a right module: its actions are read over the opposite algebra
        if not cfg.n_path:
            raise SpecError("compute tensor needs --n <module file>")
        from .algebra import opposite

        n = _load_module(cfg.n_path, algebra)
        xmod = _load_module(cfg.m_path, opposite(n.algebra))
        payload = {"operation": "tensor", "dim": tensor_dim(xmod, n)}
        return 0, [_record(cfg, n.algebra.content_hash(), payload)]
    m = _load_module(cfg.m_path, algebra)
    a = m.algebra
    if op == "ext":
        n = _load_module(cfg.n_path, a) if cfg.n_path else m
        prof = ext_profile(m, n, cfg.bound)
        payload = {
            "operation": "ext",
            "dims": prof.dims,
            "bound": cfg.bound,
            "periodicity": list(prof.periodicity) if prof.periodicity else None,
            "certified_beyond_bound": prof.certified_beyond_bound,
        }
    elif op == "transpose":
        tr = transpose(m)
        payload = {
            "operation": "transpose",
            "dim": tr.dim,
            "module": module_to_dict(tr),
            "module_hash": module_content_hash(tr),
        }
    elif op == "sigma":
        rep = evaluation_report(m)
        payload = {
            "operation": "sigma",
            "kernel_dim": rep.kernel_dim,
            "cokernel_dim": rep.cokernel_dim,
            "torsionless": rep.torsionless,
            "reflexive": rep.reflexive,
        }
    elif op == "dual":
        from .homology import algebra_dual

        dual = algebra_dual(m)
        payload = {
            "operation": "dual",
            "dim": dual.dim,
            "module": module_to_dict(dual),
            "module_hash": module_content_hash(dual),
        }
    elif op == "profile":
        prof = orthogonality_profile(m, cfg.bound)
        payload = {
            "operation": "profile",
            "selforthogonal": prof.selforthogonal,
            "ext_to_algebra_zero": prof.ext_to_algebra_zero,
            "gorenstein_projective": prof.gorenstein_projective,
            "certification": prof.certification,
            "self_ext": prof.self_ext,
            "ext_to_algebra": prof.ext_to_algebra,
            "dual_ext_to_algebra": prof.dual_ext_to_algebra,
        }
    else:
        raise SpecError(f"unknown compute operation {op!r}")
    rec = _record(cfg, a.content_hash(), payload)
    return 0, [rec]


def _cmd_verify(cfg: JobConfig):
    if not cfg.algebra_path:
        raise SpecError("verify needs --algebra <file>")
    a = _load_algebra(cfg.algebra_path)
    pids = cfg.predicates or list(PREDICATE_IDS)
    for pid in pids:
        if pid not in PREDICATE_IDS:
            raise SpecError(f"unknown predicate id {pid!r}; known: {', '.join(PREDICATE_IDS)}")
    enum_cfg = EnumerationConfig(
        max_dim=cfg.max_dim,
        exhaustive=cfg.exhaustive,
        budget=cfg.budget,
        seed=cfg.seed,
        bound=cfg.bound,
        extra_samples=cfg.extra_samples,
        extra_sample_dim=cfg.extra_sample_dim,
    )
    reports = run_suite(a, pids, enum_cfg, workers=cfg.workers)
    records = [_record(cfg, a.content_hash(), r.to_payload(), r.caveats) for r in reports]
    violations = sum(r.violations for r in reports)
    return (2 if violations else 0), records


def _cmd_enumerate(cfg: JobConfig):
    if not cfg.algebra_path:
        raise SpecError("enumerate needs --algebra <file>")
    a = _load_algebra(cfg.algebra_path)
    classes = enumerate_modules(
        a, cfg.max_dim, budget=cfg.budget, seed=cfg.seed, exhaustive=cfg.exhaustive
    )
    payload = {
        "operation": "enumerate",
        "classes": [
            {
                "dim": m.dim,
                "module": module_to_dict(m),
                "module_hash": module_content_hash(m),
            }
            for m in classes
        ],
        "count": len(classes),
    }
    return 0, [_record(cfg, a.content_hash(), payload)]


def _cmd_search(cfg: JobConfig):
    pid = cfg.predicates[0] if cfg.predicates else "thm4.7"
    scfg = SearchConfig(
        predicate_id=pid,
        algebra_kind=cfg.algebra_kind,
        num_algebras=cfg.num_algebras,
        max_dim=cfg.max_dim,
        budget=cfg.budget,
        bound=cfg.bound,
        seed=cfg.seed,
    )
    records = []
    candidates = 0
    for rep in search_counterexample(scfg):
        candidates += rep.violations
        records.append(_record(cfg, rep.algebra_hash, rep.to_payload(), rep.caveats))
    return (2 if candidates else 0), records


def _cmd_report(cfg: JobConfig):
    lines = report_summary(cfg.subject)
    sys.stdout.write(lines + "\n")
    return 0, []


def report_summary(path) -> str:
    """Human-readable digest of a JSONL report: one table row per predicate."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as e:
        raise SpecError(f"cannot read report {path}: {e}") from None
    if not raw:
        return "no records"
    rows = []
    problems = []
    for lineno, line in enumerate(raw, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            problems.append(f"line {lineno}: malformed record ({e.msg})")
            continue
        payload = rec.get("payload", {})
        if "predicate_id" in payload:
            counts = payload.get("counts", {})
            caveats = payload.get("caveats", [])
            violations = counts.get("violations", 0)
            if not payload.get("applicable", True):
                status = "NOT APPLICABLE"
            elif violations:
                status = f"VIOLATIONS={violations}"
                if any("candidate" in str(w.get("status", "")) for w in payload.get("witnesses", [])):
                    status = f"CANDIDATE (bounded) x{violations}"
                witness_note = " witnesses: " + ", ".join(
                    f"witness-{w.get('module_hash', '?')}.json" for w in payload.get("witnesses", [])
                )
                status += witness_note
            elif any("candidate" in str(c) for c in caveats):
                status = "CANDIDATE (bounded)"
            else:
                status = "OK"
            rows.append(
                f"{payload['predicate_id']:<18} checked={counts.get('modules_checked', 0):<5} "
                f"premises={counts.get('premises_satisfied', 0):<5} "
                f"violations={violations:<3} {status}"
            )
        else:
            rows.append(f"{payload.get('operation', 'record'):<18} {canonical_json(payload)[:80]}")
    out = rows + problems
    return "\n".join(out) if out else "no records"


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="homlab",
        description="Exact homological algebra over F_p: Ext, transpose duality, "
        "and verification suites for finite-dimensional algebras.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_enum=True):
        sp.add_argument("--algebra", help="algebra description file (JSON)")
        sp.add_argument("--bound", type=int, default=6, help="Ext bound B (default 6)")
        sp.add_argument("--seed", type=int, default=None,
                        help="64-bit seed (default: HOMLAB_SEED or 0)")
        sp.add_argument("--out", help="write the JSONL report here instead of stdout")
        if with_enum:
            sp.add_argument("--max-dim", type=int, default=3)
            sp.add_argument("--budget", type=int, default=1 << 20)
            sp.add_argument("--exhaustive", action="store_true", default=None)
            sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("compute", help="one homological computation on module files")
    sp.add_argument("subject", choices=["ext", "transpose", "sigma", "dual", "tensor", "profile"])
    sp.add_argument("--m", help="module file")
    sp.add_argument("--n", help="second module file (ext, tensor)")
    common(sp, with_enum=False)

    sp = sub.add_parser("verify", help="run theorem suites over enumerated modules")
    sp.add_argument("--predicate", help="comma-separated predicate ids (default: all)")
    sp.add_argument("--extra-samples", type=int, default=0)
    sp.add_argument("--extra-sample-dim", type=int, default=None)
    common(sp)

    sp = sub.add_parser("enumerate", help="list module isomorphism classes")
    common(sp)

    sp = sub.add_parser("search", help="counterexample search on sampled algebras")
    sp.add_argument("--predicate", help="thm4.7 or gnc_bounded", default="thm4.7")
    sp.add_argument("--algebra-kind", choices=["quiver_rsz", "commutative_local"],
                    default="quiver_rsz")
    sp.add_argument("--num-algebras", type=int, default=4)
    common(sp)

    sp = sub.add_parser("report", help="summarize a JSONL report")
    sp.add_argument("path")
    return ap


def _config_from_args(args) -> JobConfig:
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = int(os.environ.get("HOMLAB_SEED", "0"))
    preds = []
    if getattr(args, "predicate", None):
        preds = [x.strip() for x in args.predicate.split(",") if x.strip()]
    return JobConfig(
        command=args.command,
        subject=getattr(args, "subject", None) or getattr(args, "path", None),
        algebra_path=getattr(args, "algebra", None),
        m_path=getattr(args, "m", None),
        n_path=getattr(args, "n", None),
        predicates=preds,
        max_dim=getattr(args, "max_dim", 3),
        bound=getattr(args, "bound", 6),
        exhaustive=getattr(args, "exhaustive", None),
        budget=getattr(args, "budget", 1 << 20),
        seed=seed,
        workers=getattr(args, "workers", 1),
        out=getattr(args, "out", None),
        num_algebras=getattr(args, "num_algebras", 4),
        algebra_kind=getattr(args, "algebra_kind", "quiver_rsz"),
        extra_samples=getattr(args, "extra_samples", 0),
        extra_sample_dim=getattr(args, "extra_sample_dim", None),
    )


_COMMANDS = {
    "compute": _cmd_compute,
    "verify": _cmd_verify,
    "enumerate": _cmd_enumerate,
    "search": _cmd_search,
    "report": _cmd_report,
}


def execute(cfg: JobConfig):
    """Run a job; returns (exit status, records)."""
    handler = _COMMANDS[cfg.command]
    status, records = handler(cfg)
    _emit(records, cfg.out)
    _write_witnesses(records, cfg.out)
    return status, records


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    cfg = _config_from_args(args)
    try:
        status, _ = execute(cfg)
        return status
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except HomlabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
