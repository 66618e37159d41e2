"""Built-in variety library and named identity strings.

Presentations ship as JSON files in ``nialg/varieties``; the right-normed
variants ``ls_a2``/``ls_b2``/``ls_c2``/``ls_d2`` are produced here by
mirroring every monomial of the corresponding relation (swap children at
every node) rather than being hand-entered.  Directories listed in
``NIALG_VARIETY_PATH`` are loaded after the built-ins and may override them.
"""

from __future__ import annotations

import os

from .expr import mirror_expr
from .variety import (VarietyPresentation, load_variety_dirs, resolve_extends,
                      user_variety_dirs)

BUILTIN_DIR = os.path.join(os.path.dirname(__file__), "varieties")

MIRRORED = (
    ("ls_a1", "ls_a2"),
    ("ls_b1", "ls_b2"),
    ("ls_c1", "ls_c2"),
    ("ls_d1", "ls_d2"),
)

# primal varieties treated by the dual/polarization/basis tooling
FAMILIES = {"a1": "ls_a1", "b1": "ls_b1", "a2": "ls_a2"}
DUALS = {"ls": "perm", "ls_a1": "ls_a1_dual", "ls_b1": "ls_b1_dual",
         "ls_a2": "ls_a2_dual"}


def builtin_registry() -> dict:
    pres = load_variety_dirs([BUILTIN_DIR] + user_variety_dirs())
    for base, mirrored in MIRRORED:
        if mirrored in pres or base not in pres:
            continue
        src = pres[base]
        pres[mirrored] = VarietyPresentation(
            mirrored, src.signature,
            tuple(mirror_expr(i) for i in src.identities), src.extends)
    return resolve_extends(pres)


# ---- identities used by the rewriting systems and verification suites ----

LEFT_SYMMETRIC = "(a*b)*c - a*(b*c) - (b*a)*c + b*(a*c) = 0"

HALF_ZINBIEL = "a*(b*c) - 1/2*((b*a)*c + (a*b)*c) = 0"

# degree-4/5 identities of the dual variety that drive the A1 normal forms
A1_NF_IDENTITIES = (
    "((b*a)*c)*d = ((a*c)*b)*d",
    "(((a*b)*c)*d)*e = (((a*c)*b)*d)*e",
    "(((a*b)*c)*d)*e = (((a*b)*d)*c)*e",
)

# degree-4 identities of the dual variety that drive the B1 normal forms
B1_NF_IDENTITIES = (
    "((a*b)*c)*d = ((a*c)*b)*d",
    "d*(c*(a*b)) = 2*(d*((a*b)*c)) + ((a*c)*d)*b - 2*(((a*b)*d)*c)",
    "d*((a*c)*b) = d*((a*b)*c) + ((a*c)*d)*b - ((a*b)*d)*c",
    "c*((a*d)*b) = d*((a*c)*b)",
)

FIRST_ARG_COMMUTATIVE = "(a*b)*c = (b*a)*c"

# degree-4 identities of the dual variety that drive the A2 normal forms
A2_NF_IDENTITIES = (
    "((a*b)*c)*d = ((a*c)*b)*d",
    "d*((a*b)*c) = ((a*b)*d)*c",
    "d*(c*(a*b)) = ((a*c)*d)*b",
)

JACOBI = "[[a,b],c] + [[b,c],a] + [[c,a],b] = 0"

# the degree-4 anticommutator identity, stored fully expanded (15 terms)
JORDAN_DEGREE4 = (
    "{a,{b,{c,d}}} + {a,{c,{b,d}}} + {a,{d,{b,c}}}"
    " + {b,{a,{c,d}}} + {c,{a,{b,d}}} + {d,{a,{b,c}}}"
    " + {b,{c,{a,d}}} + {b,{d,{a,c}}} + {c,{b,{a,d}}}"
    " + {d,{b,{a,c}}} + {c,{d,{a,b}}} + {d,{c,{a,b}}}"
    " - {{a,d},{b,c}} - {{a,c},{b,d}} - {{a,b},{c,d}} = 0"
)

# polarized presentations: how the library identities read after the
# commutator/anti-commutator change of operations
POLARIZED_JACOBI = "[[a,b],c] + [[b,c],a] + [[c,a],b] = 0"
POLARIZED_SYM = (
    "{{a,b},c} = -{[a,b],c} - 2*{[a,c],b} + [{a,b},c] - [[a,c],b]"
    " + {a,{b,c}} - {a,[b,c]} + [a,{b,c}]"
)
POLARIZED_EXTRA = {
    # the bracket-class coefficients are rigid: replacing the three 2/3
    # factors by 3/2 yields a non-member of the polarized relation space
    # (pinned by a depolarization membership test in the acceptance suite)
    "ls_a1": "{a,{b,c}} = {[a,b],c} + {[a,c],b} - 2/3*[{a,b},c]"
             " - 2/3*[{a,c},b] + 2/3*[[a,c],b] - 1/3*[a,{b,c}] + 1/3*[a,[b,c]]",
    "ls_b1": "{[a,b],c} + {[b,c],a} + {[c,a],b} = 0",
    "ls_a2": "{a,{b,c}} = {[a,b],c} + {[a,c],b} + [{b,c},a]"
             " + 2/3*[[a,c],b] + 1/3*[a,[b,c]]",
}
