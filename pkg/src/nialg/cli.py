"""Command-line client.

Subcommands mirror the service endpoints one to one; by default the request
is dispatched in-process (a private engine context), while ``--server URL``
sends the same JSON payload to a running service instead.  Exit codes:
0 success, 1 mathematical mismatch (an identity that fails, a verification
or reproduction failure), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request

from . import __version__, api, reproduce
from .expr import ParseError
from .nf import RewriteError
from .variety import Context, DegreeError, SignatureMismatch, UnknownVariety


def _post(server: str, path: str, payload: dict) -> dict:
    req = urllib.request.Request(
        server.rstrip("/") + path,
        data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"},
        method="POST")
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read().decode())


class Client:
    """Dispatches a payload either to a remote service or in-process."""

    def __init__(self, server: str | None):
        self.server = server
        self._ctx = None

    @property
    def ctx(self) -> Context:
        if self._ctx is None:
            self._ctx = Context()
        return self._ctx

    def call(self, path: str, payload: dict, local) -> dict:
        if self.server:
            return _post(self.server, path, payload)
        return local(self.ctx)


def _emit(args, result: dict, text_fn) -> None:
    if args.json:
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(text_fn(result))


def _fmt_dims(res):
    degs = sorted(res["dims"], key=int)
    return " ".join(str(res["dims"][d]) for d in degs)


def _fmt_dual(res):
    lines = [f"match: {res['match'] or '(no library match)'}"]
    lines += [f"  {r}" for r in res["relations"]]
    return "\n".join(lines)


def _fmt_report(res):
    lines = [f"{res['status']}  (basis {res.get('basis_size')}"
             f", dimension {res.get('dimension')})"
             if res.get("dimension") is not None
             else f"{res['status']}  (basis {res.get('basis_size')})"]
    for f in res.get("failures", [])[:10]:
        lines.append(f"  failure: {f}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nialg",
        description="identity computations for varieties of "
                    "nonassociative algebras")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--server", help="URL of a running service; without it "
                                    "requests are computed in-process")
    p.add_argument("--json", action="store_true", help="JSON output")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dim", help="multilinear dimensions")
    d.add_argument("--variety", required=True)
    d.add_argument("--degrees", default="1..6")
    d.add_argument("--mode", choices=("auto", "exact", "certified"),
                   default="auto")
    d.add_argument("--exact", action="store_true",
                   help="shorthand for --mode exact")

    c = sub.add_parser("check-identity", help="membership in the T-ideal")
    c.add_argument("--variety", required=True)
    c.add_argument("--identity", required=True)

    du = sub.add_parser("dual", help="Koszul dual of a quadratic presentation")
    du.add_argument("--variety", required=True)
    du.add_argument("--verify", action="store_true",
                    help="also run the double-dual and tensor checks")

    po = sub.add_parser("polarize",
                        help="commutator/anti-commutator presentation")
    po.add_argument("--variety", required=True)

    de = sub.add_parser("derived", help="identities of a derived operation")
    de.add_argument("--variety", required=True)
    de.add_argument("--op", choices=("commutator", "anticommutator"),
                    required=True)
    de.add_argument("--degree", type=int, required=True)
    de.add_argument("--against", help="file with generator identities, "
                                      "one per line")
    de.add_argument("--allow-high-degree", action="store_true")

    inc = sub.add_parser("includes", help="subvariety test up to a degree")
    inc.add_argument("--sub", required=True)
    inc.add_argument("--super", dest="super_", required=True)
    inc.add_argument("--max-degree", type=int, default=4)

    vb = sub.add_parser("verify-basis", help="normal-form basis verification")
    vb.add_argument("--family", choices=("a1", "b1", "a2"), required=True)
    vb.add_argument("--degree", type=int, required=True)
    vb.add_argument("--spanning-only", action="store_true")

    nf = sub.add_parser("nf", help="normal form of a monomial")
    nf.add_argument("--family", choices=("a1", "b1", "a2"), required=True)
    nf.add_argument("--expr", required=True)

    rep = sub.add_parser("reproduce",
                         help="recompute all embedded expected tables")
    rep.add_argument("--mode", choices=("auto", "exact", "certified"),
                     default="auto")
    rep.add_argument("--kinds", help="comma-separated subset of kinds")

    va = sub.add_parser("varieties", help="list known varieties")
    va.add_argument("--name", help="show one presentation")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    client = Client(args.server)
    try:
        return _dispatch(args, client)
    except UnknownVariety as err:
        print(f"error: unknown variety {err}", file=sys.stderr)
        return 2
    except (ParseError, SignatureMismatch, DegreeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except RewriteError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except urllib.error.URLError as err:
        print(f"error: cannot reach server: {err}", file=sys.stderr)
        return 2


def _dispatch(args, client: Client) -> int:
    cmd = args.command
    if cmd == "dim":
        mode = "exact" if args.exact else args.mode
        res = client.call("/dim",
                          {"variety": args.variety, "degrees": args.degrees,
                           "mode": mode},
                          lambda ctx: api.dims(ctx, args.variety,
                                               args.degrees, mode))
        _emit(args, res, _fmt_dims)
        return 0
    if cmd == "check-identity":
        res = client.call("/check-identity",
                          {"variety": args.variety,
                           "identity": args.identity},
                          lambda ctx: api.check_identity(
                              ctx, args.variety, args.identity))
        _emit(args, res, lambda r: "true" if r["holds"] else "false")
        return 0 if res["holds"] else 1
    if cmd == "dual":
        res = client.call("/dual",
                          {"variety": args.variety, "verify": args.verify},
                          lambda ctx: api.dual_of(ctx, args.variety,
                                                  args.verify))
        _emit(args, res, _fmt_dual)
        return 0
    if cmd == "polarize":
        res = client.call("/polarize", {"variety": args.variety},
                          lambda ctx: api.polarization(ctx, args.variety))
        _emit(args, res, lambda r: "\n".join(r["identities"]))
        return 0
    if cmd == "derived":
        against = None
        if args.against:
            with open(args.against) as fh:
                against = [line.strip() for line in fh
                           if line.strip() and not line.startswith("#")]
        res = client.call("/derived",
                          {"variety": args.variety, "op": args.op,
                           "degree": args.degree, "against": against,
                           "allow_high_degree": args.allow_high_degree},
                          lambda ctx: api.derived(
                              ctx, args.variety, args.op, args.degree,
                              against, args.allow_high_degree))

        def fmt(r):
            lines = [f"rank: {r['rank']}"] + [f"  {s}"
                                              for s in r["identities"]]
            if r.get("follows_from_generators") is not None:
                lines.append("follows from generators: "
                             f"{str(r['follows_from_generators']).lower()}")
            return "\n".join(lines)

        _emit(args, res, fmt)
        return 0
    if cmd == "includes":
        res = client.call("/includes",
                          {"sub": args.sub, "super": args.super_,
                           "max_degree": args.max_degree},
                          lambda ctx: api.inclusion(ctx, args.sub,
                                                    args.super_,
                                                    args.max_degree))
        _emit(args, res, lambda r: "true" if r["includes"] else "false")
        return 0
    if cmd == "verify-basis":
        res = client.call("/verify-basis",
                          {"family": args.family, "degree": args.degree,
                           "spanning_only": args.spanning_only},
                          lambda ctx: api.basis_verification(
                              ctx, args.family, args.degree,
                              args.spanning_only))
        _emit(args, res, _fmt_report)
        return 0 if res["status"] == "pass" else 1
    if cmd == "nf":
        res = client.call("/nf",
                          {"family": args.family, "expr": args.expr},
                          lambda ctx: api.nf_of(ctx, args.family, args.expr))
        _emit(args, res, lambda r: r["normal_form"])
        return 0
    if cmd == "reproduce":
        kinds = args.kinds.split(",") if args.kinds else None
        res = client.call("/reproduce",
                          {"mode": args.mode, "kinds": kinds},
                          lambda ctx: reproduce.run(
                              ctx, args.mode, set(kinds) if kinds else None))

        def fmt(r):
            lines = [f"{x['id']}: {'ok' if x['ok'] else 'MISMATCH'}"
                     for x in r["results"]]
            lines.append(f"status: {r['status']} ({r['checked']} checks)")
            return "\n".join(lines)

        _emit(args, res, fmt)
        return 0 if res["status"] == "pass" else 1
    if cmd == "varieties":
        if args.name:
            res = api.variety_info(client.ctx, args.name)
            _emit(args, res, lambda r: "\n".join(
                [r["name"]] + [f"  {i}" for i in r["identities"]]))
        else:
            names = api.list_varieties(client.ctx)
            _emit(args, {"varieties": names},
                  lambda r: "\n".join(r["varieties"]))
        return 0
    raise AssertionError(f"unhandled command {cmd}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
