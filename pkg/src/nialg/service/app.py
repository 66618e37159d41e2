"""HTTP front end for the algebra engine.

One engine context lives for the whole process, so consequence spaces and
rewrite tables computed for one request are reused by the next -- the main
reason to run the engine as a service.  Start with:

    uvicorn nialg.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import api, reproduce
from ..expr import ParseError
from ..nf import RewriteError
from ..variety import (Context, DegreeError, SignatureMismatch,
                       UnknownVariety)
from . import schemas as S


def create_app(ctx: Context | None = None) -> FastAPI:
    app = FastAPI(title="nialg",
                  description="identity computations for varieties of "
                              "nonassociative algebras")
    engine = ctx or Context()

    def run(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UnknownVariety as err:
            raise HTTPException(404, f"unknown variety: {err}") from err
        except (ParseError, SignatureMismatch, DegreeError,
                ValueError) as err:
            raise HTTPException(422, str(err)) from err
        except RewriteError as err:
            raise HTTPException(500, str(err)) from err

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/varieties")
    def varieties() -> list[str]:
        return api.list_varieties(engine)

    @app.get("/varieties/{name}", response_model=S.VarietyInfo)
    def variety(name: str):
        return run(api.variety_info, engine, name)

    @app.post("/dim", response_model=S.DimResponse)
    def dim(req: S.DimRequest):
        return run(api.dims, engine, req.variety, req.degrees, req.mode)

    @app.post("/check-identity", response_model=S.CheckIdentityResponse)
    def check_identity(req: S.CheckIdentityRequest):
        return run(api.check_identity, engine, req.variety, req.identity)

    @app.post("/dual", response_model=S.DualResponse)
    def dual(req: S.DualRequest):
        return run(api.dual_of, engine, req.variety, req.verify)

    @app.post("/polarize", response_model=S.PolarizeResponse)
    def polarize(req: S.PolarizeRequest):
        return run(api.polarization, engine, req.variety)

    @app.post("/derived", response_model=S.DerivedResponse)
    def derived(req: S.DerivedRequest):
        return run(api.derived, engine, req.variety, req.op, req.degree,
                   req.against, req.allow_high_degree)

    @app.post("/includes", response_model=S.IncludesResponse)
    def includes(req: S.IncludesRequest):
        got = run(api.inclusion, engine, req.sub, req.super_, req.max_degree)
        return S.IncludesResponse(sub=got["sub"], super_=got["super"],
                                  max_degree=got["max_degree"],
                                  includes=got["includes"])

    @app.post("/verify-basis", response_model=S.VerifyBasisResponse)
    def verify_basis(req: S.VerifyBasisRequest):
        return run(api.basis_verification, engine, req.family, req.degree,
                   req.spanning_only, req.conservation_sample)

    @app.post("/nf", response_model=S.NfResponse)
    def nf(req: S.NfRequest):
        return run(api.nf_of, engine, req.family, req.expr)

    @app.post("/reproduce", response_model=S.ReproduceResponse)
    def reproduce_all(req: S.ReproduceRequest):
        return run(reproduce.run, engine, req.mode,
                   set(req.kinds) if req.kinds else None)

    return app


app = create_app()
