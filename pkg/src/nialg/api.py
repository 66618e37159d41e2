"""Operation layer shared by the HTTP service and the command-line client.

Every function takes the engine context first, accepts plain values, and
returns JSON-friendly dicts; the service endpoints and the CLI subcommands
are thin wrappers around these.
"""

from __future__ import annotations

import time

from . import expr as ex
from .dual import (double_dual_check, koszul_dual, lie_admissibility_check,
                   match_library_name, quadratic_presentation)
from .linalg import RelationSpace
from .magma import format_poly, format_tree, monomial_table
from .nf import dual_variety, normal_form, verify_basis
from .polar import (derived_identities, derived_signature, follows_from,
                    identity_strings, polarize)
from .variety import Context


def parse_degrees(spec) -> list:
    """Degree specs: 4, "4", "1..6", or "1,3,5"."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(x) for x in spec]
    text = str(spec).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x]


def space_identities(space: RelationSpace, sig) -> list:
    """Echelon rows rendered ``lead = -(rest)`` in the expression grammar."""
    tab = monomial_table(sig, space.degree)
    out = []
    for row, piv in zip(space.rows, space.pivots):
        lead = tab.trees[piv]
        rest = {tab.trees[c]: -v for c, v in row.items() if c != piv}
        out.append(f"{format_tree(sig, lead)} = {format_poly(sig, rest)}")
    return out


def dims(ctx: Context, variety: str, degrees, mode: str = "auto") -> dict:
    degs = parse_degrees(degrees)
    t0 = time.time()
    values = {n: ctx.dimension(variety, n, mode=mode) for n in degs}
    return {"variety": ctx.variety(variety).name,
            "dims": {str(n): values[n] for n in degs},
            "mode": mode,
            "elapsed_s": round(time.time() - t0, 3)}


def check_identity(ctx: Context, variety: str, identity: str) -> dict:
    holds = ctx.is_identity(variety, identity)
    return {"variety": ctx.variety(variety).name, "identity": identity,
            "holds": holds}


def dual_of(ctx: Context, variety: str, verify: bool = False) -> dict:
    pres = quadratic_presentation(ctx, variety)
    dual = koszul_dual(ctx, pres)
    name = match_library_name(ctx, dual.space)
    sig = ctx.variety(variety).signature
    tab = monomial_table(sig, 3)
    out = {"variety": pres.source,
           "match": name,
           "relation_dim": dual.dim,
           "relations": space_identities(dual.space, sig),
           "relation_space": dual.space.to_json(
               lambda c: format_tree(sig, tab.trees[c]))}
    if verify:
        out["double_dual_ok"] = double_dual_check(ctx, pres)
        if name is not None:
            out["lie_admissibility_ok"] = lie_admissibility_check(
                ctx, variety, name)
    return out


def polarization(ctx: Context, variety: str) -> dict:
    pres = polarize(ctx, variety)
    return {"variety": pres.source,
            "rank": pres.space.rank,
            "identities": identity_strings(pres)}


def derived(ctx: Context, variety: str, op: str, degree: int,
            against=None, allow_high_degree: bool = False) -> dict:
    space = derived_identities(ctx, variety, op, degree,
                               allow_high_degree=allow_high_degree)
    sig = derived_signature(op)
    out = {"variety": ctx.variety(variety).name, "op": op, "degree": degree,
           "rank": space.rank,
           "identities": space_identities(space, sig)}
    if against is not None:
        out["follows_from_generators"] = follows_from(ctx, space, against, sig)
        out["generators"] = list(against)
    return out


def inclusion(ctx: Context, sub: str, super_: str, max_degree: int) -> dict:
    value = ctx.includes(sub, super_, max_degree)
    return {"sub": ctx.variety(sub).name, "super": ctx.variety(super_).name,
            "max_degree": max_degree, "includes": value}


def basis_verification(ctx: Context, family: str, degree: int,
                       spanning_only: bool = False,
                       conservation_sample=None) -> dict:
    report = verify_basis(ctx, family, degree, spanning_only=spanning_only,
                          conservation_sample=conservation_sample)
    report["dual_variety"] = dual_variety(family)
    return report


def nf_of(ctx: Context, family: str, expression: str) -> dict:
    poly = normal_form(ctx, family, expression)
    from .magma import ONE_OP
    return {"family": family, "input": expression,
            "normal_form": format_poly(ONE_OP, poly)}


def variety_info(ctx: Context, name: str) -> dict:
    v = ctx.variety(name)
    return {"name": v.name,
            "ops": [{"name": op.name, "symmetry": op.symmetry}
                    for op in v.signature.ops],
            "identities": [ex.pretty(i, v.signature) + " = 0"
                           for i in v.identities]}


def list_varieties(ctx: Context) -> list:
    return sorted(ctx.registry)
