"""Degree-bounded brute-force search for R-torsion, independent of saturation.

For a candidate multiplier r in QQ[base], the elements m of degree <= D with
r*m in the QQ-span V_E of all monomial multiples u*n_j of relations of degree
<= E form a linear subspace L_r. It is found by exact Gaussian elimination over
QQ. Any m in L_r that is not in N is a torsion witness, and the explicit
combination r*m = sum c*u*n_j certifies r*m in N without a Gröbner basis.

Multiplier candidates are the base monomials of degree 1..D and the linear
forms with coefficients in {-1, 0, 1}. The search is sound but incomplete:
finding nothing only means "no witness within these bounds".
"""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .groebner import ResourceExceeded, ResourceLimits, Vector
from .modules import CertificateFailure, ModulePresentation, TorsionCertificate
from .poly import QQ, Polynomial


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchBounds:
    witness_degree: int
    multiplier_degree: int
    time_budget: float = 120.0

    def __post_init__(self):
        if self.witness_degree < 0 or self.multiplier_degree < 0:
            raise ValueError("degree bounds must be non-negative")

    @classmethod
    def recommended(cls, M: ModulePresentation, witness_degree: int) -> "SearchBounds":
        top = max((v.degree() for v in M.relations), default=0)
        return cls(witness_degree, witness_degree + top)

    def raised(self) -> "SearchBounds":
        return SearchBounds(self.witness_degree + 1, self.multiplier_degree + 1, self.time_budget)


@dataclass(frozen=True)
class Witness:
    element: Vector
    annihilator: Polynomial
    combination: tuple = ()  # (coefficient, monomial multiplier, relation index)
    bounds: SearchBounds | None = None

    def check_combination(self, M: ModulePresentation) -> bool:
        """Recompute r*m from the recorded combination of relation multiples."""
        total = Vector.zero(M.ring, M.rank)
        for c, u, j in self.combination:
            total = total + M.relations[j] * (u * c)
        return total == self.element * self.annihilator


def monomials_upto(nvars: int, degree: int) -> list[tuple]:
    """Exponent tuples of total degree <= degree, by degree then lexicographically."""
    out = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted(set(out), key=lambda e: (sum(e), tuple(-x for x in e)))


class _Echelon:
    """Fully reduced row echelon form over QQ on sparse dict rows."""

    def __init__(self):
        self.rows: dict = {}  # pivot -> row (pivot coefficient 1)

    def reduce(self, v: dict) -> dict:
        v = dict(v)
        for key in [k for k in v if k in self.rows]:
            c = v.get(key)
            if not c:
                continue
            for k, a in self.rows[key].items():
                nv = v.get(k, 0) - c * a
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, v: dict) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        pivot = max(v)
        inv = 1 / v[pivot]
        v = {k: a * inv for k, a in v.items()}
        for key, row in self.rows.items():
            c = row.get(pivot)
            if c:
                for k, a in v.items():
                    nv = row.get(k, 0) - c * a
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        self.rows[pivot] = v
        return True


def _kernel(columns: list[dict]) -> list[dict]:
    """Basis of {a : sum a_i columns[i] = 0}, as sparse dicts index -> coefficient."""
    rows: dict = {}  # pivot -> (row, combination)
    kernel = []
    for idx, col in enumerate(columns):
        v = dict(col)
        combo = {idx: QQ(1)}
        while v:
            pivot = max(v)
            if pivot not in rows:
                break
            prow, pcombo = rows[pivot]
            c = v[pivot]
            for k, a in prow.items():
                nv = v.get(k, 0) - c * a
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            for k, a in pcombo.items():
                nv = combo.get(k, 0) - c * a
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        if v:
            pivot = max(v)
            inv = 1 / v[pivot]
            rows[pivot] = ({k: a * inv for k, a in v.items()},
                           {k: a * inv for k, a in combo.items()})
        else:
            kernel.append(combo)
    return kernel


def multiplier_candidates(M: ModulePresentation, degree: int) -> list[Polynomial]:
    ring = M.ring
    base = M.tower.base
    if not base or degree < 1:
        return []
    idx = ring.indices_of(base)
    out = []
    for e in monomials_upto(len(base), degree):
        if sum(e) == 0:
            continue
        full = [0] * ring.ngens
        for i, k in zip(idx, e):
            full[i] = k
        out.append(Polynomial(ring, {tuple(full): 1}))
    y = [ring.var(v) for v in base]
    for coeffs in itertools.product((0, 1, -1), repeat=len(base)):
        nz = [c for c in coeffs if c]
        if len(nz) < 2 or nz[0] != 1:
            continue
        out.append(sum((c * v for c, v in zip(coeffs, y) if c), ring.zero))
    out.sort(key=lambda p: p.degree())
    return out


def _vec_terms(v: Vector) -> dict:
    return v.terms()


def brute_torsion_search(M: ModulePresentation, bounds: SearchBounds, *,
                         gb_free: bool = False, points: Sequence[dict] = ()
                         ) -> Witness | None:
    """Look for (m, r) with r*m in N and m not in N inside the given degree bounds.

    ``m not in N`` is checked with a Gröbner basis, or with ``gb_free=True``
    by finding one of ``points`` (zeros of every relation) where m is nonzero.
    """
    deadline = time.monotonic() + bounds.time_budget

    def tick():
        if time.monotonic() > deadline:
            raise BudgetExceeded(f"oracle budget of {bounds.time_budget:g}s exhausted")

    ring, b = M.ring, M.rank
    D, E = bounds.witness_degree, bounds.multiplier_degree
    multiples = []  # (u exponent, relation index, terms)
    span = _Echelon()
    for j, rel in enumerate(M.relations):
        d = rel.degree()
        if d < 0 or d > E:
            continue
        for u in monomials_upto(ring.ngens, E - d):
            tick()
            terms = {(c, tuple(x + y for x, y in zip(e, u))): a
                     for (c, e), a in rel.terms().items()}
            multiples.append((u, j, terms))
            span.add(terms)

    if gb_free:
        for pt in points:
            if not all(v.evaluate(pt).is_zero() for v in M.relations):
                raise ValueError(f"point {pt} is not a zero of every relation")
        G = None
    else:
        G = M.groebner(ResourceLimits(timeout=max(bounds.time_budget, 1.0)))

    def outside_N(m: Vector) -> bool:
        if G is not None:
            return not G.contains(m)
        return any(not m.evaluate(pt).is_zero() for pt in points)

    basis = [(c, e) for e in monomials_upto(ring.ngens, D) for c in range(b)]
    for r in multiplier_candidates(M, D):
        tick()
        rd = r.degree()
        usable = [(c, e) for c, e in basis if sum(e) + rd <= E]
        if not usable:
            continue
        residuals = []
        for c, e in usable:
            terms = {(c, tuple(x + y for x, y in zip(re, e))): a for re, a in r.items()}
            residuals.append(span.reduce(terms))
        for combo in _kernel(residuals):
            tick()
            terms = {usable[i]: a for i, a in combo.items()}
            m = Vector.from_terms(ring, b, terms)
            if outside_N(m):
                combination = _express(M, (m * r).terms(), multiples)
                return Witness(m, r, combination, bounds)
    return None


def _express(M: ModulePresentation, target: dict, multiples) -> tuple:
    """Explicit coefficients writing ``target`` as a combination of relation multiples."""
    ring = M.ring
    cols = [terms for _, _, terms in multiples] + [target]
    for combo in _kernel(cols):
        last = len(multiples)
        if last in combo:
            scale = -1 / combo[last]
            out = []
            for i, a in sorted(combo.items()):
                if i == last:
                    continue
                u, j, _ = multiples[i]
                out.append((a * scale, Polynomial(ring, {u: 1}), j))
            return tuple(out)
    raise ArithmeticError("target is not in the span of relation multiples")


def witness_certificate(M: ModulePresentation, w: Witness) -> TorsionCertificate:
    """Promote an oracle witness to a certificate (same checks as engine certificates)."""
    if not w.check_combination(M):
        raise CertificateFailure("oracle combination does not reproduce r*m")
    return TorsionCertificate.build(M, w.element, w.annihilator)


# cross-validation over a corpus

@dataclass(frozen=True)
class CorpusEntry:
    name: str
    problem: object  # FlatnessProblem
    expect: str | None
    bounds: SearchBounds
    first_torsion: object = "unset"
    tags: frozenset = frozenset()


@dataclass
class EntryResult:
    name: str
    expected: str | None
    engine: str
    oracle: str
    agree: bool
    detail: list[str] = field(default_factory=list)
    bounds: tuple[int, int] = (0, 0)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "engine": self.engine,
                "oracle": self.oracle, "agree": self.agree, "detail": list(self.detail),
                "bounds": list(self.bounds)}


@dataclass
class CrossValidationReport:
    entries: list[EntryResult] = field(default_factory=list)

    @property
    def all_agree(self) -> bool:
        return all(e.agree for e in self.entries)

    @property
    def mismatches(self) -> list[EntryResult]:
        return [e for e in self.entries if not e.agree]

    def to_dict(self) -> dict:
        return {"all_agree": self.all_agree, "entries": [e.to_dict() for e in self.entries]}


def load_corpus(directory: str | Path | None = None) -> list[CorpusEntry]:
    from .parsing import parse_problem

    if directory is None:
        directory = Path(__file__).parent / "corpus"
    entries = []
    for path in sorted(Path(directory).glob("*.prob")):
        pf = parse_problem(path.read_text(encoding="utf-8"), path.stem)
        if pf.oracle is None:
            raise ValueError(f"{path.name}: corpus entries need an 'oracle' section")
        entries.append(CorpusEntry(path.stem, pf.problem(), pf.expect,
                                   SearchBounds(*pf.oracle), pf.first_torsion, pf.tags))
    return entries


def validate_entry(entry: CorpusEntry, limits: ResourceLimits | None = None,
                   retries: int = 2) -> EntryResult:
    from .flatness import Status, flat_check

    t0 = time.perf_counter()
    problem = entry.problem
    verdict = flat_check(problem, limits=limits)
    engine = verdict.status.value
    detail: list[str] = []
    bounds = entry.bounds
    if verdict.status is Status.RESOURCE_EXCEEDED:
        return EntryResult(entry.name, entry.expect, engine, "skipped", False,
                           ["engine exceeded its resource limits"] + verdict.notices,
                           (bounds.witness_degree, bounds.multiplier_degree),
                           time.perf_counter() - t0)
    if problem.n == 0:
        oracle = "none"
    else:
        P = problem.power(problem.n)
        attempt = 0
        while True:
            try:
                w = brute_torsion_search(P, bounds)
            except BudgetExceeded as exc:
                w = None
                detail.append(str(exc))
            if w is not None or verdict.status is not Status.NOT_FLAT or attempt >= retries:
                break
            # a certified engine torsion element outranks an empty bounded search
            attempt += 1
            bounds = bounds.raised()
            detail.append(f"no witness; retrying at D={bounds.witness_degree}, "
                          f"E={bounds.multiplier_degree}")
        if w is not None:
            try:
                cert = witness_certificate(P, w)
                oracle = "witness"
                detail.append(f"witness m = {w.element}, r = {w.annihilator}; "
                              + "; ".join(cert.verification_trace))
            except CertificateFailure as exc:
                oracle = "bad-witness"
                detail.append(f"oracle witness failed verification: {exc}")
        else:
            oracle = "none"
    agree = True
    if engine == Status.NOT_FLAT.value and oracle != "witness":
        agree = False
        detail.append("engine found torsion but the oracle found no witness within bounds")
    if engine == Status.FLAT.value and oracle != "none":
        agree = False
        detail.append("oracle found torsion in an instance the engine declared flat")
    if entry.expect is not None and entry.expect != engine:
        agree = False
        detail.append(f"expected verdict {entry.expect!r} but the engine returned {engine!r}")
    if verdict.certificate is not None:
        detail.append(f"engine certificate m = {verdict.certificate.element}, "
                      f"r = {verdict.certificate.annihilator}")
    if entry.first_torsion != "unset" and problem.n > 0:
        ok, msg = _check_first_torsion(entry, limits)
        agree = agree and ok
        detail.append(msg)
    return EntryResult(entry.name, entry.expect, engine, oracle, agree, detail,
                       (bounds.witness_degree, bounds.multiplier_degree),
                       time.perf_counter() - t0)


def oracle_first_torsion(problem, bounds: SearchBounds) -> int | None:
    """Smallest power k <= n at which the oracle finds a witness within ``bounds``."""
    for k in range(1, problem.n + 1):
        if brute_torsion_search(problem.power(k), bounds) is not None:
            return k
    return None


def _check_first_torsion(entry: CorpusEntry, limits) -> tuple[bool, str]:
    from .flatness import first_torsion_power

    engine = first_torsion_power(entry.problem, limits)
    oracle = oracle_first_torsion(entry.problem, entry.bounds)
    ok = engine == entry.first_torsion and oracle == engine
    return ok, (f"first torsion power: recorded {entry.first_torsion}, engine {engine}, "
                f"oracle {oracle}")


def cross_validate(corpus: Iterable[CorpusEntry], limits: ResourceLimits | None = None,
                   jobs: int = 1) -> CrossValidationReport:
    corpus = list(corpus)
    if jobs > 1 and len(corpus) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(validate_entry, corpus, [limits] * len(corpus)))
    else:
        results = [validate_entry(e, limits) for e in corpus]
    return CrossValidationReport(results)
