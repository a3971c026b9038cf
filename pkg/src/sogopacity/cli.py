"""Command-line front end.

Exit status: 0 when the model is opaque (or the command succeeded), 1 when
it is not opaque (``enforce``: when it already was), 2 on any error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from . import corpus
from .checker import Verdict, check, check_simple
from .enforce import compute_min_superlanguage, opacify
from .errors import OpacityError, UsageError
from .io import Model, dumps, load, lts_to_dict, net_to_dict
from .net import validate_wf_structure
from .oracle import oracle_disclosures
from .sog import export_dot, export_lts_dot

VARIANTS = {"simple": "simple", "kweak": "k_weak", "kstrong": "k_strong"}
OUTPUT_DIR_ENV = "SOGOPACITY_OUTPUT_DIR"


def _load(spec: str) -> Model:
    if spec.startswith("corpus:"):
        return corpus.load_model(spec.split(":", 1)[1])
    return load(spec)


def _stem(spec: str) -> str:
    return spec.split(":", 1)[1] if spec.startswith("corpus:") else Path(spec).stem


def _output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV) or ".")


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def _verdict_text(v: Verdict, lts) -> str:
    name = {"simple": "simple", "k_weak": f"{v.k}-step weak", "k_strong": f"{v.k}-step strong"}[v.variant]
    lines = [f"{name} opacity: {'opaque' if v.opaque else 'NOT opaque'}"]
    lines.append(
        f"  {v.stats['states']} states, {v.stats['aggregates']} aggregates, "
        f"{v.stats['estimator_states']} estimator states"
    )
    for c in v.counterexamples:
        shown = " ".join(lts.label(e) for e in c.trace) or "ε"
        lag = f" (lag {c.lag})" if v.variant != "simple" else ""
        lines.append(f"  disclosed after: {shown}{lag}")
    return "\n".join(lines) + "\n"


def cmd_check(args) -> int:
    model = _load(args.model)
    lts, secret = model.semantics()
    variant = VARIANTS[args.variant]
    v = check(lts, secret, variant, 0 if variant == "simple" else args.k)
    text = dumps(v.to_dict()) if args.format == "json" else _verdict_text(v, lts)
    _emit(text, args.output)
    return 0 if v.opaque else 1


def cmd_enforce(args) -> int:
    model = _load(args.model)
    lts, secret = model.semantics()
    before, sog = check_simple(lts, secret)
    additions = compute_min_superlanguage(lts, secret, sog, before.counterexamples)
    patched_net, patched_lts, _, patch = opacify(
        model.net, lts, sog, before.counterexamples, secret_markings=model.secrets
    )
    if model.net is not None:
        doc = net_to_dict(patched_net, model.secrets, name=model.name, description=model.description)
        after_lts, patched_secret = Model(net=patched_net, secrets=model.secrets).semantics()
    else:
        # dummy states are fresh, so the secret set is unchanged
        doc = lts_to_dict(patched_lts, secret, name=model.name, description=model.description)
        patched_secret, after_lts = secret, patched_lts
    after = check_simple(after_lts, patched_secret)[0]

    def k_step(l, s):
        return {v: check(l, s, v, args.k).opaque for v in ("k_weak", "k_strong")}

    report = patch.to_dict()
    report["verdict_before"] = {"opaque": before.opaque, "traces": [list(t) for t in before.traces()]}
    report["verdict_after"] = {"opaque": after.opaque}
    report["min_superlanguage"] = [list(w) for w in additions.sorted()]
    report["k_step"] = {"k": args.k, "before": k_step(lts, secret), "after": k_step(after_lts, patched_secret)}
    if patch.is_identity:
        report["note"] = "model already opaque; identity patch, model unchanged"

    stem = _stem(args.model)
    out = Path(args.output) if args.output else _output_dir() / f"{stem}.opacified.json"
    report_path = out.with_name(out.name.removesuffix(".json") + ".patch.json")
    _emit(dumps(doc), str(out))
    _emit(dumps(report), str(report_path))
    if args.format == "text":
        state = "already opaque; identity patch" if patch.is_identity else (
            f"{len(patch.new_transitions)} dummy transition(s) added; "
            f"{'opaque' if after.opaque else 'NOT opaque'} after patching"
        )
        sys.stdout.write(f"{state}\nwrote {out}\nwrote {report_path}\n")
    else:
        sys.stdout.write(dumps(report))
    return 1 if patch.is_identity else 0


def cmd_export_dot(args) -> int:
    model = _load(args.model)
    lts, secret = model.semantics()
    _, sog = check_simple(lts, secret)
    out_dir = Path(args.output) if args.output else _output_dir()
    stem = _stem(args.model)
    sog_path = out_dir / f"{stem}.sog.dot"
    lts_path = out_dir / f"{stem}.lts.dot"
    _emit(export_dot(sog, name=f"{stem} SOG"), str(sog_path))
    _emit(export_lts_dot(lts, secret, name=f"{stem} LTS"), str(lts_path))
    sys.stdout.write(f"wrote {sog_path}\nwrote {lts_path}\n")
    return 0


def cmd_oracle(args) -> int:
    model = _load(args.model)
    lts, secret = model.semantics()
    found = oracle_disclosures(lts, secret, args.k, args.oracle_depth)
    if args.format == "json":
        text = dumps([{"trace": list(w), "variant": v, "lag": lag} for w, v, lag in found])
    else:
        text = "".join(f"{v:<9} lag {lag}  {' '.join(w) or 'ε'}\n" for w, v, lag in found)
    _emit(text, args.output)
    return 0


def cmd_validate(args) -> int:
    model = _load(args.model)
    if model.net is None:
        raise UsageError(f"{args.model}: validate needs a net model, got an LTS")
    diags = validate_wf_structure(model.net)
    if args.format == "json":
        text = dumps([{"code": d.code, "element": d.element, "message": d.message} for d in diags])
    else:
        text = "".join(f"{d.message}\n" for d in diags) or "workflow structure ok\n"
    _emit(text, args.output)
    return 1 if diags else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sogopacity",
        description="Verify and enforce opacity of Petri nets and labeled transition systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("model", help="model file (JSON) or corpus:NAME")
        p.add_argument("-o", "--output", help="output file (directory for export-dot)")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.set_defaults(func=func)
        return p

    p = add("check", cmd_check, "decide opacity and print the verdict")
    p.add_argument("--variant", choices=tuple(VARIANTS), default="simple")
    p.add_argument("-k", type=_count, default=1, help="K for the K-step variants (default 1)")
    p = add("enforce", cmd_enforce, "make the model simply opaque; write patched model and report")
    p.add_argument("-k", type=_count, default=1, help="K for the before/after K-step verdicts")
    add("export-dot", cmd_export_dot, f"write the SOG and LTS as DOT files (default dir: ${OUTPUT_DIR_ENV} or .)")
    p = add("oracle", cmd_oracle, "list disclosing observations by brute force")
    p.add_argument("-k", type=_count, default=1)
    p.add_argument("--oracle-depth", type=_count, default=None, help="max observation length (default |Q|+K+2)")
    add("validate", cmd_validate, "check the workflow-net structure")
    return parser


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OpacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
