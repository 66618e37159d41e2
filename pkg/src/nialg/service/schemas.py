"""Request/response models for the computation service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DimRequest(BaseModel):
    variety: str
    degrees: str = "1..6"
    mode: str = Field(default="auto", pattern="^(auto|exact|certified)$")


class DimResponse(BaseModel):
    variety: str
    dims: dict[str, int]
    mode: str
    elapsed_s: float


class CheckIdentityRequest(BaseModel):
    variety: str
    identity: str


class CheckIdentityResponse(BaseModel):
    variety: str
    identity: str
    holds: bool


class DualRequest(BaseModel):
    variety: str
    verify: bool = False


class DualResponse(BaseModel):
    variety: str
    match: str | None
    relation_dim: int
    relations: list[str]
    relation_space: list[dict[str, str]]
    double_dual_ok: bool | None = None
    lie_admissibility_ok: bool | None = None


class PolarizeRequest(BaseModel):
    variety: str


class PolarizeResponse(BaseModel):
    variety: str
    rank: int
    identities: list[str]


class DerivedRequest(BaseModel):
    variety: str
    op: str = Field(pattern="^(commutator|anticommutator)$")
    degree: int = Field(ge=2, le=5)
    against: list[str] | None = None
    allow_high_degree: bool = False


class DerivedResponse(BaseModel):
    variety: str
    op: str
    degree: int
    rank: int
    identities: list[str]
    follows_from_generators: bool | None = None
    generators: list[str] | None = None


class IncludesRequest(BaseModel):
    sub: str
    super_: str = Field(alias="super")
    max_degree: int = Field(default=4, ge=1)

    model_config = {"populate_by_name": True}


class IncludesResponse(BaseModel):
    sub: str
    super_: str = Field(serialization_alias="super")
    max_degree: int
    includes: bool


class VerifyBasisRequest(BaseModel):
    family: str = Field(pattern="^(a1|b1|a2)$")
    degree: int = Field(ge=1, le=8)
    spanning_only: bool = False
    conservation_sample: int | None = None


class VerifyBasisResponse(BaseModel):
    family: str
    degree: int
    mode: str
    basis_size: int
    dimension: int | None = None
    dual_variety: str
    status: str
    checked_monomials: int | None = None
    checked_products: int | None = None
    failures: list


class NfRequest(BaseModel):
    family: str = Field(pattern="^(a1|b1|a2)$")
    expr: str


class NfResponse(BaseModel):
    family: str
    input: str
    normal_form: str


class ReproduceRequest(BaseModel):
    mode: str = Field(default="auto", pattern="^(auto|exact|certified)$")
    kinds: list[str] | None = None


class ReproduceResponse(BaseModel):
    status: str
    checked: int
    failed: list[str]
    results: list


class VarietyInfo(BaseModel):
    name: str
    ops: list[dict]
    identities: list[str]
