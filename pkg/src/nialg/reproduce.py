"""Regression harness: recompute the embedded expected tables and diff.

The expected values live in ``nialg/data/expected.json``; two runs produce
byte-identical JSON (fixed pivot rules, fixed prime list, sorted outputs).
"""

from __future__ import annotations

import json
import os

from . import api, library
from .linalg import rref, same_span
from .magma import POLARIZED, monomial_table
from .polar import expression_vector, polarize
from .variety import Context

DATA_PATH = os.path.join(os.path.dirname(__file__), "data", "expected.json")

GENERATORS = {
    "jacobi": library.JACOBI,
    "jordan4": library.JORDAN_DEGREE4,
}


def load_expected() -> dict:
    with open(DATA_PATH) as fh:
        return json.load(fh)


def _run_dims(ctx, entry, mode):
    got = api.dims(ctx, entry["variety"], entry["degrees"], mode=mode)
    values = [got["dims"][str(n)] for n in
              api.parse_degrees(entry["degrees"])]
    return values


def _run_dual(ctx, entry):
    return api.dual_of(ctx, entry["variety"])["match"]


def _run_polarize_members(ctx, entry):
    """Each expected identity must lie in the computed span; where flagged,
    it must equal the echelon row with the same leading monomial; and the
    expected set must generate the whole span (closed under relabelings)."""
    pres = polarize(ctx, entry["variety"])
    tab = monomial_table(POLARIZED, 3)
    ok = []
    vecs = []
    for text, want_row in zip(entry["expected_members"], entry["row_exact"]):
        vec = expression_vector(text, POLARIZED, 3)
        vecs.append(vec)
        member = pres.space.contains(vec)
        if not want_row:
            ok.append(bool(member))
            continue
        row_match = False
        if member:
            space = rref([vec], len(tab), sig=POLARIZED, degree=3,
                         order=pres.space.order)
            piv = space.pivots[0]
            for row, rpiv in zip(pres.space.rows, pres.space.pivots):
                if rpiv == piv:
                    row_match = row == space.rows[0]
        ok.append(bool(member and row_match))
    if entry.get("generating"):
        from .magma import act_poly, all_perms
        orbit = []
        for vec in vecs:
            poly = {tab.trees[c]: v for c, v in vec.items()}
            for perm in all_perms(3):
                img = act_poly(POLARIZED, perm, poly)
                orbit.append({tab.index[t]: v for t, v in img.items()})
        span = rref(orbit, len(tab), sig=POLARIZED, degree=3,
                    order=pres.space.order)
        ok.append(same_span(span, pres.space))
    return ok


def _run_derived(ctx, entry):
    gens = [GENERATORS[g] for g in entry["generators"]]
    got = api.derived(ctx, entry["variety"], entry["op"], entry["degree"],
                      against=gens)
    return [got["rank"], got["follows_from_generators"]]


def _run_includes(ctx, entry):
    return api.inclusion(ctx, entry["sub"], entry["super"],
                         entry["max_degree"])["includes"]


def _run_basis(ctx, entry):
    rep = api.basis_verification(ctx, entry["family"], entry["degree"],
                                 conservation_sample=200)
    return [rep["basis_size"], rep["status"]]


def run(ctx: Context | None = None, mode: str = "auto",
        kinds=None) -> dict:
    """Recompute every embedded expectation; returns a deterministic report."""
    if ctx is None:
        ctx = Context()
    data = load_expected()
    results = []
    for entry in data["entries"]:
        kind = entry["kind"]
        if kinds and kind not in kinds:
            continue
        if kind == "dims":
            got = _run_dims(ctx, entry, mode)
            expected = entry["expected"]
        elif kind == "dual":
            got = _run_dual(ctx, entry)
            expected = entry["expected"]
        elif kind == "polarize":
            got = _run_polarize_members(ctx, entry)
            expected = [True] * len(got)
        elif kind == "derived":
            got = _run_derived(ctx, entry)
            expected = [entry["expected_rank"], entry["expected_follows"]]
        elif kind == "includes":
            got = _run_includes(ctx, entry)
            expected = entry["expected"]
        elif kind == "basis":
            got = _run_basis(ctx, entry)
            expected = [entry["expected_size"], "pass"]
        else:
            raise ValueError(f"unknown expectation kind {kind!r}")
        results.append({"id": entry["id"], "kind": kind,
                        "expected": expected, "got": got,
                        "ok": got == expected})
    results.sort(key=lambda r: r["id"])
    status = "pass" if all(r["ok"] for r in results) else "fail"
    return {"status": status,
            "checked": len(results),
            "failed": [r["id"] for r in results if not r["ok"]],
            "results": results}


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
