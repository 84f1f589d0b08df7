"""
JSON action-spec files.

    {"format": 1, "n": 2, "kind": "closed_form", "fixed_point": [[0, 0], [0, 0]],
     "coords": [{"terms": [{"alpha": [1, 0], "laurent": [{"k": 1, "re": 1.0, "im": 0.0}]}]}, ...]}

vector_field and polymap terms carry "coeff": [re, im] instead of "laurent". A polymap file is a
linearizer; it also records the weights and the diagonalizing basis.
"""
import json
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .action import ActionSpec
from .basemodels import WeightData
from .config import SPEC_FORMAT_VERSION
from .exception import SpecFormatError
from .linearize import PolynomialLinearizer
from .poly import ActionPoly, LaurentPoly, PolyMap

ComplexPair = tuple[float, float]
SpecKind = Literal["closed_form", "vector_field", "polymap"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LaurentTerm(_Strict):
    k: int
    re: float
    im: float = 0.0


class Term(_Strict):
    alpha: list[int]
    coeff: Optional[ComplexPair] = None
    laurent: Optional[list[LaurentTerm]] = None

    @model_validator(mode="after")
    def _one_payload(self) -> "Term":
        if (self.coeff is None) == (self.laurent is None):
            raise ValueError("a term carries exactly one of 'coeff' and 'laurent'")
        if any(a < 0 for a in self.alpha):
            raise ValueError(f"negative exponent in alpha {self.alpha}")
        if self.laurent is not None:
            ks = [t.k for t in self.laurent]
            if len(set(ks)) != len(ks):
                raise ValueError(f"repeated Laurent exponent in {ks}")
        return self


class Coordinate(_Strict):
    terms: list[Term] = Field(default_factory=list)


class SpecDocument(_Strict):
    format: Literal[1]
    n: int = Field(ge=1)
    kind: SpecKind
    fixed_point: list[ComplexPair]
    coords: list[Coordinate]
    weights: Optional[list[int]] = None
    basis: Optional[list[list[ComplexPair]]] = None
    description: Optional[str] = None

    @model_validator(mode="after")
    def _consistent(self) -> "SpecDocument":
        if len(self.fixed_point) != self.n:
            raise ValueError(f"fixed_point has {len(self.fixed_point)} entries, n = {self.n}")
        if len(self.coords) != self.n:
            raise ValueError(f"{len(self.coords)} coordinates given, n = {self.n}")
        symbolic = self.kind == "closed_form"
        for i, coord in enumerate(self.coords):
            seen = set()
            for term in coord.terms:
                if len(term.alpha) != self.n:
                    raise ValueError(f"coordinate {i}: alpha {term.alpha} does not have length {self.n}")
                if tuple(term.alpha) in seen:
                    raise ValueError(f"coordinate {i}: alpha {term.alpha} appears twice")
                seen.add(tuple(term.alpha))
                if symbolic and term.laurent is None:
                    raise ValueError(f"coordinate {i}: closed_form terms need 'laurent'")
                if not symbolic and term.coeff is None:
                    raise ValueError(f"coordinate {i}: {self.kind} terms need 'coeff'")
        if self.kind != "polymap" and (self.weights is not None or self.basis is not None):
            raise ValueError("'weights' and 'basis' belong to polymap files")
        if self.weights is not None and len(self.weights) != self.n:
            raise ValueError(f"{len(self.weights)} weights for n = {self.n}")
        if self.basis is not None and (len(self.basis) != self.n or any(len(r) != self.n for r in self.basis)):
            raise ValueError(f"basis is not {self.n} x {self.n}")
        return self


###############################
# Parsing
###############################
def _location(loc: tuple) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def parse_document(text: str, source: str = "<string>") -> SpecDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    try:
        return SpecDocument.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(f"{_location(err['loc'])}: {err['msg']}" for err in e.errors())
        raise SpecFormatError(f"{source}: {problems}") from e


def load_document(path: Union[str, Path]) -> SpecDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecFormatError(f"{path}: cannot read file ({e.strerror})") from e
    return parse_document(text, str(path))


def _pairs_to_vector(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def document_to_spec(doc: SpecDocument) -> ActionSpec:
    p = _pairs_to_vector(doc.fixed_point)
    if doc.kind == "closed_form":
        coords = [{tuple(t.alpha): LaurentPoly({lt.k: complex(lt.re, lt.im) for lt in t.laurent})
                   for t in coord.terms} for coord in doc.coords]
        return ActionSpec.closed_form(ActionPoly(doc.n, coords), p)
    if doc.kind == "vector_field":
        return ActionSpec.vector_field(_document_polymap(doc), p)
    raise SpecFormatError("a polymap file holds a linearizer, not an action")


def _document_polymap(doc: SpecDocument) -> PolyMap:
    return PolyMap(doc.n, [{tuple(t.alpha): complex(*t.coeff) for t in coord.terms} for coord in doc.coords])


def document_to_linearizer(doc: SpecDocument) -> PolynomialLinearizer:
    if doc.kind != "polymap":
        raise SpecFormatError(f"expected a polymap file, got kind {doc.kind!r}")
    n = doc.n
    weights = tuple(doc.weights) if doc.weights is not None else tuple([1] * n)
    basis = (np.eye(n, dtype=complex) if doc.basis is None
             else np.array([[complex(re, im) for re, im in row] for row in doc.basis]))
    wd = WeightData(weights=weights, basis=basis, residual=0.0)
    return PolynomialLinearizer(_document_polymap(doc), _pairs_to_vector(doc.fixed_point), wd)


def load_action_spec(path: Union[str, Path]) -> ActionSpec:
    return document_to_spec(load_document(path))


def load_linearizer(path: Union[str, Path]) -> PolynomialLinearizer:
    return document_to_linearizer(load_document(path))


###############################
# Serialization
###############################
def _pair(z: complex) -> ComplexPair:
    z = complex(z)
    return (z.real, z.imag)


def spec_to_document(spec: ActionSpec, description: Optional[str] = None) -> SpecDocument:
    n = spec.dimension
    if spec.is_closed_form:
        coords = [Coordinate(terms=[
            Term(alpha=list(alpha), laurent=[LaurentTerm(k=k, re=c.real, im=c.imag) for k, c in sorted(lp.terms.items())])
            for alpha, lp in spec.action.items(i)]) for i in range(n)]
        kind = "closed_form"
    else:
        coords = _polymap_coords(spec.field)
        kind = "vector_field"
    return SpecDocument(format=SPEC_FORMAT_VERSION, n=n, kind=kind,
                        fixed_point=[_pair(v) for v in spec.fixed_point], coords=coords,
                        description=description)


def _polymap_coords(f: PolyMap) -> list[Coordinate]:
    return [Coordinate(terms=[Term(alpha=list(alpha), coeff=_pair(c)) for alpha, c in f.items(i)])
            for i in range(f.dimension)]


def linearizer_to_document(linearizer: PolynomialLinearizer, description: Optional[str] = None) -> SpecDocument:
    basis = linearizer.weights.basis
    return SpecDocument(format=SPEC_FORMAT_VERSION, n=linearizer.dimension, kind="polymap",
                        fixed_point=[_pair(v) for v in linearizer.fixed_point],
                        coords=_polymap_coords(linearizer.polymap),
                        weights=list(linearizer.weights.weights),
                        basis=[[_pair(v) for v in row] for row in basis],
                        description=description)


def dump_document(doc: SpecDocument) -> str:
    return json.dumps(doc.model_dump(exclude_none=True), indent=2) + "\n"


class PointsDocument(_Strict):
    points: list[list[ComplexPair]]


def load_points(path: Union[str, Path], n: Optional[int] = None) -> np.ndarray:
    """Point list file {"points": [[[re, im], ...], ...]}; shape (m, n)."""
    path = Path(path)
    try:
        doc = PointsDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SpecFormatError(f"{path}: cannot read file ({e.strerror})") from e
    except ValidationError as e:
        problems = "; ".join(f"{_location(err['loc'])}: {err['msg']}" for err in e.errors())
        raise SpecFormatError(f"{path}: {problems}") from e
    points = [_pairs_to_vector(p) for p in doc.points]
    if n is not None and any(p.shape != (n,) for p in points):
        raise SpecFormatError(f"{path}: every point needs {n} coordinates")
    return np.array(points, dtype=complex).reshape(len(points), -1)
