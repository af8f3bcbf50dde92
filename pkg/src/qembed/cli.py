"""Command-line front end: embed, infer, sample, verify and run algorithm demos.

Exit codes: 0 ok, 1 failed verification or other error, 2 invalid input,
3 size cap exceeded, 4 impossible evidence, 5 promise violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .algorithms import DEMOS
from .embedding import DEFAULT_CAP_BITS, LeafMap, embed_cbnet
from .errors import CapError, ImpossibleEvidence, InsufficientRank, NetError, PromiseViolation, QembedError
from .inference import JointTable, Samples, ancestral_sample, conditional, empirical, exact_joint
from .netcore import CB, Net, load_net, serialize_net, validate
from .qsim import embedded_joint, estimate_conditional, sample_leaves, verify_net_embedding

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_EVIDENCE = 4
EXIT_PROMISE = 5

DEFAULT_SEED = 20240101
DEFAULT_CAP = 24

_TABLE = {
    "type": "object",
    "required": ["scope", "rows"],
    "properties": {
        "scope": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["states", "probability"],
                "properties": {
                    "states": {"type": "array", "items": {"type": "string"}},
                    "probability": {"type": "number", "minimum": 0},
                },
            },
        },
    },
}

SCHEMAS = {
    "embed": {
        "type": "object",
        "required": ["input", "net_out", "map_out", "cb_nodes", "qb_nodes", "cb_bits", "qb_bits", "lean"],
        "properties": {
            "input": {"type": "string"},
            "net_out": {"type": "string"},
            "map_out": {"type": "string"},
            "cb_nodes": {"type": "integer", "minimum": 0},
            "qb_nodes": {"type": "integer", "minimum": 0},
            "cb_bits": {"type": "number"},
            "qb_bits": {"type": "number"},
            "lean": {"type": "boolean"},
        },
    },
    "infer": {
        "type": "object",
        "required": ["query", "evidence", "engine", "result"],
        "properties": {
            "query": {"type": "array", "items": {"type": "string"}},
            "evidence": {"type": "object", "additionalProperties": {"type": "string"}},
            "engine": {"enum": ["classical", "quantum", "both"]},
            "result": _TABLE,
            "max_deviation": {"type": "number", "minimum": 0},
        },
    },
    "sample": {
        "type": "object",
        "required": ["engine", "n", "seed", "query", "evidence", "accepted", "estimate", "exact"],
        "properties": {
            "engine": {"enum": ["classical", "quantum"]},
            "n": {"type": "integer", "minimum": 0},
            "seed": {"type": "integer"},
            "query": {"type": "array", "items": {"type": "string"}},
            "evidence": {"type": "object"},
            "accepted": {"type": "integer", "minimum": 0},
            "estimate": _TABLE,
            "exact": _TABLE,
            "max_deviation": {"type": "number", "minimum": 0},
        },
    },
    "verify": {
        "type": "object",
        "required": ["ok", "max_error", "location", "tolerance", "lean"],
        "properties": {
            "ok": {"type": "boolean"},
            "max_error": {"type": "number", "minimum": 0},
            "location": {"type": "object"},
            "tolerance": {"type": "number"},
            "lean": {"type": "boolean"},
        },
    },
    "demo": {
        "type": "object",
        "required": ["algorithm", "inputs"],
        "properties": {
            "algorithm": {"enum": ["deutsch-jozsa", "simon", "bernstein-vazirani", "grover", "younes", "microscope"]},
            "inputs": {"type": "object"},
            "r": {"type": "integer", "minimum": 0},
            "success": {"type": "number", "minimum": 0, "maximum": 1.0000001},
            "warnings": {"type": "array", "items": {"type": "string"}},
        },
    },
}


@dataclass
class RunConfig:
    command: str
    net: Path | None = None
    query: list[str] = field(default_factory=list)
    evidence: dict[str, str] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    cap_bits: int = DEFAULT_CAP
    json_out: Path | None = None
    csv_out: Path | None = None
    lean: bool = False

    @property
    def cap(self) -> int:
        return 2**self.cap_bits

    @classmethod
    def from_args(cls, args) -> RunConfig:
        if not 1 <= args.cap <= 40:
            raise NetError(f"--cap must lie in 1..40 bits, got {args.cap}")
        return cls(
            command=args.command,
            net=getattr(args, "net", None),
            query=parse_query(getattr(args, "query", "")),
            evidence=parse_evidence(getattr(args, "evidence", "")),
            seed=args.seed,
            cap_bits=args.cap,
            json_out=args.json,
            csv_out=args.csv,
            lean=args.lean,
        )


# ----------------------------------------------------------------------------
# parsing helpers


def parse_query(text: str | None) -> list[str]:
    if not text:
        return []
    items = [t.strip() for t in text.split(",")]
    if any(not t for t in items):
        raise NetError(f"empty node name in query {text!r}")
    return items


def parse_evidence(text: str | None) -> dict[str, str]:
    out: dict[str, str] = {}
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise NetError(f"evidence item {part!r} is not of the form node=state")
        k, v = (s.strip() for s in part.split("=", 1))
        if not k or not v:
            raise NetError(f"evidence item {part!r} is not of the form node=state")
        if k in out:
            raise NetError(f"node {k!r} observed twice")
        out[k] = v
    return out


def _check_names(net: Net, query: Sequence[str], evidence: dict[str, str]) -> None:
    for nid in list(query) + list(evidence):
        if nid not in net:
            raise NetError(f"unknown node {nid!r}; nodes are {', '.join(net.ids)}")
    for k, v in evidence.items():
        net[k].states.index(v)


def load_cbnet(path: Path) -> Net:
    try:
        net = load_net(path)
    except FileNotFoundError:
        raise NetError(f"no such file: {path}") from None
    if net.flavor != CB:
        raise NetError(f"{path} holds a quantum net; expected a classical one")
    report = validate(net)
    if not report.ok:
        raise NetError(f"{path} is not a valid net:\n{report}")
    return net


def table_doc(t: JointTable) -> dict:
    spaces = [t.space(i) for i in t.scope]
    rows = []
    for idx in np.ndindex(*t.probs.shape):
        rows.append({"states": [sp.labels[k] for sp, k in zip(spaces, idx)], "probability": float(t.probs[idx])})
    return {"scope": list(t.scope), "rows": rows}


def format_table(t: JointTable) -> str:
    if not t.scope:
        return repr(float(t.probs))
    spaces = [t.space(i) for i in t.scope]
    lines = []
    for idx in np.ndindex(*t.probs.shape):
        label = " ".join(f"{n}={sp.labels[k]}" for n, sp, k in zip(t.scope, spaces, idx))
        lines.append(f"{label}\t{float(t.probs[idx])!r}")
    return "\n".join(lines)


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _write(path: Path | None, text: str) -> None:
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def bins_warning(n: int, bins: int) -> str | None:
    """Rule of thumb: at least one sample per outcome bin."""
    if n < bins:
        return f"{n} samples for {bins} bins is below one data point per bin; estimates will be unreliable"
    return None


# ----------------------------------------------------------------------------
# commands


def cmd_embed(args) -> int:
    net = load_cbnet(args.net)
    qb, leafmap = embed_cbnet(net, lean=args.lean, cap_bits=args.cap)
    out_dir = args.out_dir if args.out_dir is not None else args.net.parent
    stem = args.net.name[:-5] if args.net.name.endswith(".json") else args.net.name
    net_out, map_out = out_dir / f"{stem}.qb.json", out_dir / f"{stem}.map.json"
    _write(net_out, serialize_net(qb))
    _write(map_out, leafmap.to_json())
    doc = {
        "input": str(args.net),
        "net_out": str(net_out),
        "map_out": str(map_out),
        "cb_nodes": len(net),
        "qb_nodes": len(qb),
        "cb_bits": net.packed_bits(),
        "qb_bits": qb.packed_bits(),
        "lean": bool(args.lean),
    }
    print(f"classical net: {len(net)} nodes, {net.packed_bits():g} packed bits")
    print(f"quantum net:   {len(qb)} nodes, {qb.packed_bits():g} packed bits")
    print(f"wrote {net_out} and {map_out}")
    _write(args.json, dump_json(doc))
    return EXIT_OK


def _quantum_joint(net: Net, args) -> JointTable:
    qb, leafmap = embed_cbnet(net, lean=args.lean, cap_bits=args.cap)
    return embedded_joint(qb, net, leafmap, 2**args.cap)


def cmd_infer(args) -> int:
    net = load_cbnet(args.net)
    query, evidence = parse_query(args.query), parse_evidence(args.evidence)
    _check_names(net, query, evidence)
    engine = "both" if args.compare else args.engine
    results = {}
    if engine in ("classical", "both"):
        results["classical"] = conditional(exact_joint(net, 2**args.cap), query, evidence)
    if engine in ("quantum", "both"):
        results["quantum"] = conditional(_quantum_joint(net, args), query, evidence)
    main = results.get("classical", results.get("quantum"))
    print(format_table(main))
    doc = {"query": query, "evidence": evidence, "engine": engine, "result": table_doc(main)}
    if len(results) == 2:
        dev = float(np.abs(results["classical"].probs - results["quantum"].probs).max()) if main.probs.size else 0.0
        doc["max_deviation"] = dev
        print(f"max deviation classical vs quantum: {dev!r}")
    _write(args.json, dump_json(doc))
    _write(args.csv, main.to_csv())
    return EXIT_OK


def _relabel(samples: Samples, net: Net, leafmap: LeafMap) -> Samples:
    cols = [samples.column(leafmap.leaf(i)) for i in net.ids]
    states = np.stack(cols, axis=1) if cols else np.zeros((len(samples), 0), dtype=np.int64)
    return Samples(net.ids, states, tuple(n.states for n in net.nodes))


def cmd_sample(args) -> int:
    net = load_cbnet(args.net)
    query = parse_query(args.query) or list(net.ids)
    evidence = parse_evidence(args.evidence)
    _check_names(net, query, evidence)
    if args.n < 0:
        raise NetError("sample count must be non-negative")
    if args.engine == "quantum":
        qb, leafmap = embed_cbnet(net, lean=args.lean, cap_bits=args.cap)
        samples = _relabel(sample_leaves(qb, args.n, args.seed, cap=2**args.cap), net, leafmap)
    else:
        samples = ancestral_sample(net, args.n, args.seed)
    bins = math.prod(net[q].size for q in query)
    msg = bins_warning(args.n, bins)
    if msg:
        warn(msg)
    exact = conditional(exact_joint(net, 2**args.cap), query, evidence)
    ev_idx = {k: net[k].states.index(v) for k, v in evidence.items()}
    accepted = int(np.all([samples.column(k) == v for k, v in ev_idx.items()], axis=0).sum()) if ev_idx else len(samples)
    if accepted == 0:
        raise ImpossibleEvidence(f"no accepted runs: evidence {evidence} never occurred in {args.n} samples")
    est = estimate_conditional(samples, query, ev_idx)
    dev = float(np.abs(est.probs - exact.probs).max())
    print(f"{args.engine} sampling: {args.n} runs, {accepted} accepted")
    print(format_table(est))
    print(f"max deviation from exact: {dev!r}")
    doc = {
        "engine": args.engine,
        "n": args.n,
        "seed": args.seed,
        "query": query,
        "evidence": evidence,
        "accepted": accepted,
        "estimate": table_doc(est),
        "exact": table_doc(exact),
        "max_deviation": dev,
    }
    _write(args.json, dump_json(doc))
    _write(args.csv, samples.to_csv())
    return EXIT_OK


def cmd_verify(args) -> int:
    net = load_cbnet(args.net)
    qb, leafmap = embed_cbnet(net, lean=args.lean, cap_bits=args.cap)
    rep = verify_net_embedding(qb, net, leafmap, tol=args.tol, cap=2**args.cap)
    status = "ok" if rep.ok else "FAILED"
    print(f"{status}: max deviation {rep.max_error!r} at {rep.location}")
    doc = {"ok": rep.ok, "max_error": rep.max_error, "location": rep.location, "tolerance": args.tol,
           "lean": bool(args.lean)}
    _write(args.json, dump_json(doc))
    return EXIT_OK if rep.ok else EXIT_FAIL


def _demo_params(args) -> dict:
    name = args.name
    p = {}
    if name in ("dj", "simon", "bv", "grover", "younes", "microscope") and args.nb is not None:
        p["nb"] = args.nb
    if name == "dj":
        p["f"] = args.f or "balanced"
        p["seed"] = args.seed
    elif name == "simon":
        p["seed"] = args.seed
        if args.period is not None:
            p["period"] = args.period
        if args.samples is not None:
            p["samples"] = args.samples
    elif name == "bv":
        if args.b is not None:
            p["b"] = args.b
    elif name in ("grover", "younes", "microscope"):
        if args.target is not None:
            p["target"] = args.target
        if args.r is not None:
            p["r"] = args.r
        if name == "microscope":
            if args.p:
                p["p"] = [float(v) for v in args.p.split(",")]
                p.pop("target", None)
            if args.alpha is not None:
                p["alpha"] = args.alpha
    return p


def cmd_demo(args) -> int:
    params = _demo_params(args)
    if args.name == "microscope" and "p" in params and "nb" in params:
        if len(params["p"]) != 2 ** params["nb"]:
            raise NetError(f"--p needs {2 ** params['nb']} values for nb={params['nb']}")
        params.pop("nb")
    doc = DEMOS[args.name](**params)
    warnings = []
    if args.name == "simon":
        nb = doc["inputs"]["nb"]
        msg = bins_warning(doc["inputs"]["samples"], 2**nb)
        if msg:
            warnings.append(msg)
    if args.samples is not None and args.name != "simon":
        n_bins = len(doc.get("distribution", [])) if isinstance(doc.get("distribution"), list) else 0
        msg = bins_warning(args.samples, n_bins) if n_bins else None
        if msg:
            warnings.append(msg)
    for w in warnings:
        warn(w)
    if warnings:
        doc["warnings"] = warnings
    text = dump_json(doc)
    sys.stdout.write(text)
    _write(args.json, text)
    return EXIT_OK


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qembed", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, metavar="BITS",
                        help="size cap as a power of two (default %(default)s)")
    common.add_argument("--json", type=Path, metavar="PATH")
    common.add_argument("--csv", type=Path, metavar="PATH")
    common.add_argument("--lean", action="store_true", help="drop marginalizers of single-child roots")

    p = sub.add_parser("embed", parents=[common], help="q-embed a classical net")
    p.add_argument("net", type=Path)
    p.add_argument("--out-dir", type=Path)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("infer", parents=[common], help="conditional probabilities")
    p.add_argument("net", type=Path)
    p.add_argument("--query", "-q", default="")
    p.add_argument("--evidence", "-e", default="")
    p.add_argument("--engine", choices=["classical", "quantum", "both"], default="classical")
    p.add_argument("--compare", action="store_true", help="run both engines and print their deviation")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("sample", parents=[common], help="estimate by repeated measurement")
    p.add_argument("net", type=Path)
    p.add_argument("-n", type=int, default=10000)
    p.add_argument("--query", "-q", default="")
    p.add_argument("--evidence", "-e", default="")
    p.add_argument("--engine", choices=["classical", "quantum"], default="quantum")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", parents=[common], help="check an embedding against exact inference")
    p.add_argument("net", type=Path)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", parents=[common], help="run a reference algorithm")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--nb", type=int)
    p.add_argument("--f", help="constant0, constant1, parity, bit<k>, balanced or table:<bits>")
    p.add_argument("--period", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--target", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--p", help="comma-separated P(y=0|x) values")
    p.add_argument("--alpha", type=float)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        RunConfig.from_args(args)
        return args.func(args)
    except PromiseViolation as e:
        print(f"error: promise violated: {e}", file=sys.stderr)
        return EXIT_PROMISE
    except ImpossibleEvidence as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EVIDENCE
    except CapError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (NetError, InsufficientRank) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except QembedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
