"""
Oracle spec strings: ``file:<path>``, ``hash:...``, ``random:...``, ``xnp:...``, ``paley:q=...``,
``example13``, plus ``field:n=..,p=..[,g=..]`` for field contexts.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..core.errors import ComplexInputError
from ..core.finite_field import FieldCtx
from ..core.iterated_paley import XnpOracle, example13, paley_graph
from ..core.random_complex import HashComplexOracle, ProbProfile, sample_explicit
from ..core.settings import Settings
from ..core.simplex_core import ComplexView, ExplicitComplex

# key order and defaults per scheme; None marks a required key
_SCHEMES: Dict[str, Tuple[Tuple[str, Optional[str]], ...]] = {
    "hash": (("n", None), ("p", "0.5"), ("dim", "2"), ("seed", "0")),
    "random": (("n", None), ("p", "0.5"), ("dim", "2"), ("seed", "0")),
    "xnp": (("n", None), ("p", None), ("g", ""), ("dim", "2")),
    "paley": (("q", None),),
    "field": (("n", None), ("p", None), ("g", "")),
}
_FLOAT_KEYS = {"p"}


def _normalize(scheme: str, key: str, value: str) -> str:
    if value == "":
        return value
    try:
        if scheme in ("hash", "random") and key in _FLOAT_KEYS:
            return repr(float(value))
        return str(int(value))
    except ValueError as e:
        raise ComplexInputError(f"bad value '{value}' for {scheme}:{key}") from e


def _parse_params(scheme: str, body: str) -> Tuple[Tuple[str, str], ...]:
    given: Dict[str, str] = {}
    for item in filter(None, body.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ComplexInputError(f"expected key=value in '{item}'")
        given[key.strip()] = value.strip()
    layout = _SCHEMES[scheme]
    unknown = set(given) - {k for k, _ in layout}
    if unknown:
        raise ComplexInputError(f"unknown {scheme} parameter(s): {', '.join(sorted(unknown))}")
    params = []
    for key, default in layout:
        if key not in given and default is None:
            raise ComplexInputError(f"{scheme} spec needs {key}=")
        params.append((key, _normalize(scheme, key, given.get(key, default or ""))))
    return tuple(params)


@dataclass(frozen=True)
class OracleSpec:
    """Parsed oracle string; ``canonical()`` reproduces it with defaults filled in."""

    scheme: str
    params: Tuple[Tuple[str, str], ...] = ()
    path: Optional[str] = None

    @classmethod
    def parse(cls, text: str) -> "OracleSpec":
        text = text.strip()
        if text == "example13":
            return cls("example13")
        scheme, sep, body = text.partition(":")
        if not sep:
            raise ComplexInputError(f"unrecognised oracle spec '{text}'")
        if scheme == "file":
            if not body:
                raise ComplexInputError("file: spec needs a path")
            return cls("file", path=body)
        if scheme not in _SCHEMES or scheme == "field":
            raise ComplexInputError(f"unknown oracle scheme '{scheme}'")
        return cls(scheme, _parse_params(scheme, body))

    def canonical(self) -> str:
        if self.scheme == "example13":
            return "example13"
        if self.scheme == "file":
            return f"file:{self.path}"
        body = ",".join(f"{k}={v}" for k, v in self.params if v != "")
        return f"{self.scheme}:{body}"

    def get(self, key: str) -> str:
        return dict(self.params)[key]

    def build(self, settings: Optional[Settings] = None) -> ComplexView:
        settings = settings or Settings()
        if self.scheme == "example13":
            return example13()
        if self.scheme == "file":
            return ExplicitComplex.load(self.path)  # type: ignore[arg-type]
        if self.scheme == "paley":
            return paley_graph(int(self.get("q")))
        if self.scheme in ("hash", "random"):
            profile = ProbProfile(p_vertex=1.0, p=float(self.get("p")))
            if self.scheme == "random":
                return sample_explicit(
                    int(self.get("n")), profile, int(self.get("dim")), int(self.get("seed"))
                )
            return HashComplexOracle(
                int(self.get("n")), profile, int(self.get("dim")), int(self.get("seed"))
            )
        ctx = _field_from(self, settings)
        return XnpOracle(ctx, int(self.get("dim")), settings.budgets.max_simplex_size)


def _field_from(spec: OracleSpec, settings: Settings) -> FieldCtx:
    g = spec.get("g")
    return FieldCtx.create(
        int(spec.get("n")),
        int(spec.get("p")),
        int(g) if g else None,
        dlog_cap=settings.field.dlog_cap,
        factor_limit=settings.budgets.factor_trial_limit,
    )


def parse_field(text: str, settings: Optional[Settings] = None) -> FieldCtx:
    scheme, sep, body = text.strip().partition(":")
    if scheme != "field" or not sep:
        raise ComplexInputError(f"expected field:n=..,p=..[,g=..], got '{text}'")
    return _field_from(OracleSpec("field", _parse_params("field", body)), settings or Settings())


def require_explicit(view: ComplexView, command: str) -> ExplicitComplex:
    if not isinstance(view, ExplicitComplex):
        raise ComplexInputError(f"{command} needs an explicit complex (file:, random:, paley: or example13)")
    return view
