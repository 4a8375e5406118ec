"""JSON encodings for every artifact type.

Exact values are written as rational strings ("3/2"); float values are written
as JSON numbers and the enclosing object is marked ``"approx": true``.
"""
from __future__ import annotations

from fractions import Fraction

from .constgroup import ConstOperator
from .diagonal import DiagonalSequence
from .errors import MalformedInput
from .levy import LevyTriplet
from .membership import LimitRow, MembershipVerdict, SubspaceCertificate
from .moment import KSpec, NoViolationFound, ViolationCertificate
from .operator import DiffOperator
from .poly import Polynomial


def scalar_to_json(c):
    if isinstance(c, Fraction):
        return str(c)
    return float(c)


def scalar_from_json(v):
    if isinstance(v, bool):
        raise MalformedInput(f"not a number: {v!r}")
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise MalformedInput(f"not a rational string: {v!r}") from None
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise MalformedInput(f"not a number: {v!r}")


def _alpha(entry, n):
    try:
        alpha = tuple(int(a) for a in entry["alpha"])
    except (KeyError, TypeError, ValueError):
        raise MalformedInput(f"bad exponent entry {entry!r}") from None
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise MalformedInput(f"exponent {alpha} invalid in dimension {n}")
    return alpha


def _n(obj) -> int:
    try:
        n = int(obj["n"])
    except (KeyError, TypeError, ValueError):
        raise MalformedInput("missing dimension 'n'") from None
    if n < 1:
        raise MalformedInput("dimension must be positive")
    return n


def _approx(obj: dict, exact: bool) -> dict:
    if not exact:
        obj["approx"] = True
    return obj


# -- polynomials and operators -----------------------------------------------

def poly_to_json(p: Polynomial) -> dict:
    terms = [{"alpha": list(a), "coeff": scalar_to_json(c)} for a, c in p.items()]
    return _approx({"n": p.n, "terms": terms}, p.is_exact)


def poly_from_json(obj) -> Polynomial:
    n = _n(obj)
    terms = {}
    for entry in obj.get("terms", []):
        alpha = _alpha(entry, n)
        if alpha in terms:
            raise MalformedInput(f"duplicate exponent {alpha}")
        terms[alpha] = scalar_from_json(entry.get("coeff"))
    return Polynomial(n, terms)


def operator_to_json(T: DiffOperator) -> dict:
    table = [{"alpha": list(a), "q": poly_to_json(q)} for a, q in T.items()]
    return _approx({"n": T.n, "D": T.D, "table": table}, T.is_exact)


def const_to_json(A: ConstOperator) -> dict:
    table = [{"alpha": list(a), "a": scalar_to_json(c)} for a, c in A.items()]
    exact = all(isinstance(c, Fraction) for _, c in A.items())
    return _approx({"n": A.n, "D": A.D, "kind": "const", "table": table}, exact)


def operator_from_json(obj) -> DiffOperator | ConstOperator:
    """Entries carrying ``"a"`` give a ConstOperator, entries carrying ``"q"`` a DiffOperator."""
    n = _n(obj)
    try:
        D = int(obj["D"])
    except (KeyError, TypeError, ValueError):
        raise MalformedInput("missing order 'D'") from None
    entries = obj.get("table", [])
    if entries:
        const = all("a" in e for e in entries)
    else:
        const = obj.get("kind") == "const"
    table = {}
    try:
        for e in entries:
            alpha = _alpha(e, n)
            if "a" in e:
                table[alpha] = scalar_from_json(e["a"])
            elif "q" in e:
                q = e["q"]
                table[alpha] = poly_from_json(q) if isinstance(q, dict) else scalar_from_json(q)
            else:
                raise MalformedInput(f"table entry without 'q' or 'a': {e!r}")
        if const:
            return ConstOperator(n, D, table)
        return DiffOperator(n, D, table)
    except MalformedInput:
        raise
    except ValueError as exc:
        raise MalformedInput(str(exc)) from None


def diagonal_to_json(s: DiagonalSequence) -> dict:
    values = [{"alpha": list(a), "v": scalar_to_json(v)} for a, v in s.values.items()]
    return {"n": s.n, "D": s.D, "kind": s.kind, "values": values}


def diagonal_from_json(obj) -> DiagonalSequence:
    n = _n(obj)
    kind = obj.get("kind", "t")
    values = {_alpha(e, n): scalar_from_json(e.get("v")) for e in obj.get("values", [])}
    try:
        return DiagonalSequence(n, int(obj["D"]), values, kind)
    except (KeyError, ValueError) as exc:
        raise MalformedInput(str(exc)) from None


def action_from_json(obj):
    """``{"n", "D", "images": [{"alpha", "image": poly}]}``; unlisted monomials map to 0."""
    n = _n(obj)
    D = int(obj["D"])
    images = {_alpha(e, n): poly_from_json(e["image"]) for e in obj.get("images", [])}
    return n, D, lambda alpha: images.get(tuple(alpha), Polynomial.zero(n))


# -- Lévy data ---------------------------------------------------------------

def triplet_to_json(t: LevyTriplet) -> dict:
    return {
        "n": t.n,
        "Sigma": [[scalar_to_json(v) for v in row] for row in t.Sigma],
        "b": [scalar_to_json(v) for v in t.b],
        "nu": [{"z": [scalar_to_json(v) for v in z], "w": scalar_to_json(w)} for z, w in t.nu],
    }


def triplet_from_json(obj) -> LevyTriplet:
    n = _n(obj)
    try:
        Sigma = [[scalar_from_json(v) for v in row] for row in obj["Sigma"]]
        b = [scalar_from_json(v) for v in obj["b"]]
        nu = [([scalar_from_json(v) for v in a["z"]], scalar_from_json(a["w"])) for a in obj.get("nu", [])]
    except (KeyError, TypeError):
        raise MalformedInput("triplet needs 'Sigma', 'b' and atoms with 'z', 'w'") from None
    return LevyTriplet(n, Sigma, b, nu)


# -- verdict payloads --------------------------------------------------------

def certificate_to_json(c: ViolationCertificate) -> dict:
    exact = isinstance(c.value, Fraction)
    return _approx(
        {
            "y": [scalar_to_json(v) for v in c.y],
            "witness": poly_to_json(c.witness),
            "root": poly_to_json(c.root),
            "factor": poly_to_json(c.factor),
            "value": scalar_to_json(c.value),
            "construction": c.construction,
            "matrix": c.matrix,
        },
        exact,
    )


def certificate_from_json(obj) -> ViolationCertificate:
    try:
        return ViolationCertificate(
            tuple(scalar_from_json(v) for v in obj["y"]),
            poly_from_json(obj["witness"]),
            poly_from_json(obj["root"]),
            poly_from_json(obj["factor"]),
            scalar_from_json(obj["value"]),
            obj.get("construction", "square"),
            obj.get("matrix", "moment"),
        )
    except KeyError as exc:
        raise MalformedInput(f"certificate missing {exc}") from None


def no_violation_to_json(r: NoViolationFound) -> dict:
    return {
        "grid": [[scalar_to_json(v) for v in y] for y in r.grid],
        "order": r.order,
        "warnings": list(r.warnings),
    }


def subspace_to_json(c: SubspaceCertificate) -> dict:
    return {
        "basis": [poly_to_json(b) for b in c.basis],
        "matrix": [[scalar_to_json(v) for v in row] for row in c.matrix],
    }


def subspace_from_json(obj) -> SubspaceCertificate:
    basis = tuple(poly_from_json(b) for b in obj["basis"])
    matrix = tuple(tuple(scalar_from_json(v) for v in row) for row in obj["matrix"])
    return SubspaceCertificate(basis, matrix)


def membership_to_json(v: MembershipVerdict) -> dict:
    out = {"tag": v.tag}
    if v.member:
        out["filtration"] = [subspace_to_json(c) for c in v.filtration]
    else:
        tr = v.trace
        out["trace"] = {
            "monomial": list(tr.monomial),
            "reason": tr.reason,
            "steps": [{"iterate": s.iterate, "degree": s.degree} for s in tr.steps],
        }
    return out


def limit_rows_to_json(rows: list[LimitRow]) -> dict:
    return {
        "approx": True,
        "rows": [{"k": r.k, "forward": r.forward, "backward": r.backward, "note": r.note} for r in rows],
    }


def kspec_from_text(text: str) -> KSpec:
    try:
        return KSpec.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(str(exc)) from None
