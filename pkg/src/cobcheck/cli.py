"""Scenario ingestion, pipeline orchestration, and report emission.

A scenario file (JSON, schema 1) declares named spaces, Lagrangians,
clean intersections, cobordism claims, a probe Lagrangian, and the
common Laurent grading.  Running it executes:

    admissibility checks -> homology of all spaces -> spin check via the
    Mayer-Vietoris ranks -> spectral-sequence branch solve per probe
    pair -> coefficient change to the common grading -> feasibility of
    every claim's exact-sequence system.

Reports are deterministic byte-for-byte: a text derivation trace
followed by a JSON verdict block carrying the same verdicts.

Exit codes: 0 = ran, no claim obstructed; 10 = ran, at least one claim
INFEASIBLE; 1 = validation/admissibility error; 2 = internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass

from .abgroup import FgAbGroup
from .graded import GradedGroup, GradingError, LaurentGrading, coefficient_change
from .spectra import BranchTree, SpectraError, solve_floer
from .topology import (Circle, Explicit, LagrangianDescriptor, Product,
                       RealProjective, SpaceExpr, Sphere, TopologyError,
                       homology, mayer_vietoris_spin_check,
                       monotonicity_constant, pair_maslov, z2_cohomology_dims)
from .exactness import (AdmissibilityError, CobordismClaim, ClaimVerdict,
                        UnsupportedProblemError, certify_nonexistence,
                        common_grading_check)


class ScenarioError(ValueError):
    """Validation failure; the message carries a path into the document."""


class SolverLimitError(RuntimeError):
    """The solver produced no consistent branch; usually the entry bound
    is too small rather than the scenario being infeasible."""


_STAGE_ERRORS = (ScenarioError, AdmissibilityError, TopologyError, GradingError,
                 UnsupportedProblemError, SpectraError)


@contextmanager
def _stage(name: str):
    """Prefix any pipeline failure with the stage it happened in; later
    stages never run."""
    try:
        yield
    except SolverLimitError as exc:
        raise SolverLimitError(f"stage {name}: {exc}") from exc
    except _STAGE_ERRORS as exc:
        raise type(exc)(f"stage {name}: {exc}") from exc


# ---------------------------------------------------------------------------
# Scenario model


@dataclass(frozen=True)
class IntersectionDecl:
    pair: tuple[str, str]
    clean: bool
    connected: bool
    space: SpaceExpr
    restriction_surjective_degrees: tuple[int, ...]


@dataclass(frozen=True)
class ClaimDecl:
    source: str
    ends: tuple[str, str]
    spin: bool
    monotone: bool


@dataclass(frozen=True)
class PinDecl:
    pair: tuple[str, str]
    degree: int
    group: FgAbGroup


@dataclass(frozen=True)
class ObstructionScenario:
    name: str
    spaces: tuple[tuple[str, SpaceExpr], ...]
    lagrangians: tuple[LagrangianDescriptor, ...]
    intersections: tuple[IntersectionDecl, ...]
    claims: tuple[ClaimDecl, ...]
    probe: str
    grading: LaurentGrading
    entry_bound: int = 4
    window: int = 2
    pins: tuple[PinDecl, ...] = ()

    def lagrangian(self, name: str) -> LagrangianDescriptor:
        for lag in self.lagrangians:
            if lag.name == name:
                return lag
        raise ScenarioError(f"unknown Lagrangian {name!r}")

    def intersection_of(self, a: str, b: str) -> IntersectionDecl | None:
        for decl in self.intersections:
            if {decl.pair[0], decl.pair[1]} == {a, b}:
                return decl
        return None


# ---------------------------------------------------------------------------
# Parsing


def _parse_group(raw, path: str) -> FgAbGroup:
    if not isinstance(raw, dict) or set(raw) - {"free", "torsion"}:
        raise ScenarioError(f"{path}: group must be {{'free': n, 'torsion': [...]}}")
    try:
        return FgAbGroup(int(raw.get("free", 0)), tuple(int(d) for d in raw.get("torsion", ())))
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _parse_space(raw, names: dict[str, SpaceExpr], path: str) -> SpaceExpr:
    if isinstance(raw, str):
        if raw == "circle":
            return Circle()
        if raw in names:
            return names[raw]
        raise ScenarioError(f"{path}: dangling space name {raw!r}")
    if not isinstance(raw, dict) or len(raw) != 1:
        raise ScenarioError(f"{path}: space must be a name or a one-key constructor object")
    (kind, value), = raw.items()
    try:
        if kind == "sphere":
            return Sphere(int(value))
        if kind == "rp":
            return RealProjective(int(value))
        if kind == "product":
            if not isinstance(value, list) or len(value) < 2:
                raise ScenarioError(f"{path}.product: needs at least two factors")
            expr = _parse_space(value[0], names, f"{path}.product[0]")
            for i, item in enumerate(value[1:], start=1):
                expr = Product(expr, _parse_space(item, names, f"{path}.product[{i}]"))
            return expr
        if kind == "explicit":
            table = {int(k): _parse_group(v, f"{path}.explicit.homology[{k}]")
                     for k, v in value.get("homology", {}).items()}
            return Explicit(GradedGroup.from_dict(table), int(value["dim"]))
    except TopologyError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    raise ScenarioError(f"{path}: unknown space constructor {kind!r}")


def _serialize_space(expr: SpaceExpr):
    if isinstance(expr, Sphere):
        return {"sphere": expr.n}
    if isinstance(expr, RealProjective):
        return {"rp": expr.n}
    if isinstance(expr, Circle):
        return "circle"
    if isinstance(expr, Product):
        factors = []
        node = expr
        while isinstance(node, Product):
            factors.append(node.right)
            node = node.left
        factors.append(node)
        return {"product": [_serialize_space(f) for f in reversed(factors)]}
    return {"explicit": {
        "dim": expr.dimension,
        "homology": {str(d): {"free": g.free_rank, "torsion": list(g.torsion)}
                     for d, g in expr.homology.entries},
    }}


def describe_space(expr: SpaceExpr) -> str:
    if isinstance(expr, Sphere):
        return f"S^{expr.n}"
    if isinstance(expr, RealProjective):
        return f"RP^{expr.n}"
    if isinstance(expr, Circle):
        return "S^1"
    if isinstance(expr, Product):
        return f"{describe_space(expr.left)} x {describe_space(expr.right)}"
    return f"explicit(dim {expr.dimension})"


def parse_scenario(data) -> ObstructionScenario:
    """Validate a scenario document (dict or JSON text); every violation
    is reported with a path into the document."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("top level: expected an object")
    if data.get("schema") != 1:
        raise ScenarioError(f"schema: expected 1, got {data.get('schema')!r}")
    name = data.get("name", "scenario")

    names: dict[str, SpaceExpr] = {}
    for key, raw in data.get("spaces", {}).items():
        if key == "circle":
            raise ScenarioError("spaces.circle: name shadows the built-in circle")
        names[key] = _parse_space(raw, names, f"spaces.{key}")

    raw_lagrangians = data.get("lagrangians", [])
    if not raw_lagrangians:
        raise ScenarioError("lagrangians: no Lagrangians declared")
    lagrangians = []
    seen = set()
    for i, raw in enumerate(raw_lagrangians):
        path = f"lagrangians[{i}]"
        lag_name = raw.get("name")
        if not lag_name:
            raise ScenarioError(f"{path}.name: missing")
        if lag_name in seen:
            raise ScenarioError(f"{path}.name: duplicate {lag_name!r}")
        seen.add(lag_name)
        space = None
        if raw.get("space") is not None:
            space = _parse_space(raw["space"], names, f"{path}.space")
        maslov = raw.get("maslov")
        try:
            lagrangians.append(LagrangianDescriptor(
                name=lag_name,
                space=space,
                ambient_dim=int(raw["ambient"]),
                maslov=None if maslov is None else int(maslov),
                orientable=bool(raw.get("orientable", True)),
                spin=bool(raw.get("spin", True)),
                monotone=bool(raw.get("monotone", True)),
            ))
        except KeyError as exc:
            raise ScenarioError(f"{path}: missing field {exc}") from exc
        except TopologyError as exc:
            raise ScenarioError(f"{path}: {exc}") from exc
    ambients = {lag.ambient_dim for lag in lagrangians}
    if len(ambients) != 1:
        raise ScenarioError(
            f"lagrangians: ambient dimensions differ ({sorted(ambients)}); "
            "one scenario lives in one CP^n")

    def check_name(ref: str, path: str) -> str:
        if ref not in seen:
            raise ScenarioError(f"{path}: dangling Lagrangian name {ref!r}")
        return ref

    intersections = []
    for i, raw in enumerate(data.get("intersections", [])):
        path = f"intersections[{i}]"
        pair = raw.get("pair", [])
        if len(pair) != 2:
            raise ScenarioError(f"{path}.pair: expected two names")
        degrees = tuple(int(d) for d in raw.get("restriction_surjective_degrees", []))
        if any(d < 0 for d in degrees):
            raise ScenarioError(f"{path}.restriction_surjective_degrees: negative degree")
        intersections.append(IntersectionDecl(
            pair=(check_name(pair[0], f"{path}.pair[0]"), check_name(pair[1], f"{path}.pair[1]")),
            clean=bool(raw.get("clean", False)),
            connected=bool(raw.get("connected", False)),
            space=_parse_space(raw["space"], names, f"{path}.space"),
            restriction_surjective_degrees=degrees,
        ))

    claims = []
    for i, raw in enumerate(data.get("claims", [])):
        path = f"claims[{i}]"
        ends = raw.get("ends", [])
        if len(ends) != 2:
            raise ScenarioError(f"{path}.ends: expected two names (ordered)")
        claims.append(ClaimDecl(
            source=check_name(raw["source"], f"{path}.source"),
            ends=(check_name(ends[0], f"{path}.ends[0]"), check_name(ends[1], f"{path}.ends[1]")),
            spin=bool(raw.get("spin", True)),
            monotone=bool(raw.get("monotone", True)),
        ))
    sources = {c.source for c in claims}
    if len(sources) > 1:
        raise ScenarioError(f"claims: all claims must share one source, got {sorted(sources)}")

    probe = data.get("probe")
    if claims:
        if probe is None:
            raise ScenarioError("probe: required when claims are present")
        check_name(probe, "probe")
    elif probe is not None:
        check_name(probe, "probe")

    try:
        grading = LaurentGrading(int(data.get("grading", -2)))
    except GradingError as exc:
        raise ScenarioError(f"grading: {exc}") from exc

    entry_bound = int(data.get("entry_bound", 4))
    if entry_bound < 1:
        raise ScenarioError(f"entry_bound: must be >= 1, got {entry_bound}")
    window = int(data.get("window", 2))
    if window < 2:
        raise ScenarioError(f"window: must be >= 2, got {window}")

    pins = []
    for i, raw in enumerate(data.get("pins", [])):
        path = f"pins[{i}]"
        pair = raw.get("pair", [])
        if len(pair) != 2:
            raise ScenarioError(f"{path}.pair: expected two names")
        pins.append(PinDecl(
            pair=(check_name(pair[0], f"{path}.pair[0]"), check_name(pair[1], f"{path}.pair[1]")),
            degree=int(raw["degree"]),
            group=_parse_group(raw["group"], f"{path}.group"),
        ))

    return ObstructionScenario(
        name=name,
        spaces=tuple(sorted(names.items())),
        lagrangians=tuple(lagrangians),
        intersections=tuple(intersections),
        claims=tuple(claims),
        probe=probe if probe is not None else "",
        grading=grading,
        entry_bound=entry_bound,
        window=window,
        pins=tuple(pins),
    )


def serialize_scenario(sc: ObstructionScenario) -> dict:
    """Inverse of parse_scenario up to inlining of space references."""
    out = {
        "schema": 1,
        "name": sc.name,
        "spaces": {k: _serialize_space(v) for k, v in sc.spaces},
        "lagrangians": [
            {
                "name": lag.name,
                "space": None if lag.space is None else _serialize_space(lag.space),
                "ambient": lag.ambient_dim,
                "maslov": lag.maslov,
                "orientable": lag.orientable,
                "spin": lag.spin,
                "monotone": lag.monotone,
            }
            for lag in sc.lagrangians
        ],
        "intersections": [
            {
                "pair": list(decl.pair),
                "clean": decl.clean,
                "connected": decl.connected,
                "space": _serialize_space(decl.space),
                "restriction_surjective_degrees": list(decl.restriction_surjective_degrees),
            }
            for decl in sc.intersections
        ],
        "claims": [
            {"source": c.source, "ends": list(c.ends), "spin": c.spin, "monotone": c.monotone}
            for c in sc.claims
        ],
        "grading": sc.grading.t_degree,
        "entry_bound": sc.entry_bound,
        "window": sc.window,
    }
    if sc.probe:
        out["probe"] = sc.probe
    if sc.pins:
        out["pins"] = [
            {"pair": list(p.pair), "degree": p.degree,
             "group": {"free": p.group.free_rank, "torsion": list(p.group.torsion)}}
            for p in sc.pins
        ]
    return out


# ---------------------------------------------------------------------------
# Pipeline


@dataclass
class PairResult:
    probe: str
    end: str
    native_step: int
    tree: BranchTree
    folded: list[tuple[str, tuple[FgAbGroup, FgAbGroup]]]


@dataclass
class RunReport:
    scenario: ObstructionScenario
    admissibility: list[str]
    homology_lines: list[str]
    spin_lines: list[str]
    pair_results: list[PairResult]
    claim_verdicts: list[ClaimVerdict]

    def trace_lines(self) -> list[str]:
        lines: list[str] = []
        for pr in self.pair_results:
            lines.append(f"pair HF({pr.probe}, {pr.end}) at deg T = -{pr.native_step}:")
            for i, leaf in enumerate(pr.tree.leaves, start=1):
                lines.append(f"  branch {i}:")
                lines.extend(f"    {ln}" for ln in leaf.trace)
            if pr.tree.bound_may_truncate:
                lines.append(f"  note: entry bound {pr.tree.entry_bound} may truncate "
                             "the differential search (free generators present)")
            for label, (h0, h1) in pr.folded:
                lines.append(f"  folded to deg T = {self.scenario.grading.t_degree}: "
                             f"{label}: HF_0 = {h0}, HF_1 = {h1}")
        for cv in self.claim_verdicts:
            src = self.scenario.claims[0].source if self.scenario.claims else "?"
            lines.append(f"claim {src} ~> ({cv.ends[0]}, {cv.ends[1]})"
                         f"{' [granted by surgery]' if cv.granted else ''}: {cv.verdict}")
            for branch in cv.branches:
                lines.append(f"  {branch.label}:")
                if branch.verdict.feasible:
                    w = branch.verdict.witness
                    dims = ", ".join(f"{k} = {v}" for k, v in sorted(w["dims"].items())) or "none"
                    ranks = "; ".join(f"{k}: {list(v)}" for k, v in sorted(w["ranks"].items()))
                    lines.append(f"    feasible; witness dims: {dims}; map ranks: {ranks}")
                else:
                    lines.append("    infeasible:")
                    lines.extend(f"      {ln}" for ln in branch.verdict.certificate.lines())
        return lines

    def verdict_json(self) -> dict:
        hf_tables = {}
        for pr in self.pair_results:
            hf_tables[f"({pr.probe},{pr.end})"] = {
                "native_step": pr.native_step,
                "native": [
                    {"branch": i, "hf_even": str(leaf.hf_even), "hf_odd": str(leaf.hf_odd)}
                    for i, leaf in enumerate(pr.tree.leaves, start=1)
                ],
                "folded": [
                    {"branch": label, "hf0": str(h0), "hf1": str(h1)}
                    for label, (h0, h1) in pr.folded
                ],
            }
        return {
            "scenario": self.scenario.name,
            "grading": self.scenario.grading.t_degree,
            "claims": [
                {
                    "ends": list(cv.ends),
                    "granted": cv.granted,
                    "verdict": cv.verdict,
                    "branches": len(cv.branches),
                }
                for cv in self.claim_verdicts
            ],
            "hf_tables": hf_tables,
        }

    def text(self) -> str:
        bar = "=" * 64
        lines = [f"cobordism obstruction report: {self.scenario.name}", bar, ""]
        lines.append("[admissibility]")
        lines.extend(self.admissibility)
        lines.append("")
        lines.append("[homology]")
        lines.extend(self.homology_lines)
        lines.append("")
        lines.append("[spin]")
        lines.extend(self.spin_lines if self.spin_lines else ["no spin checks requested"])
        lines.append("")
        lines.append("[derivation]")
        lines.extend(self.trace_lines())
        lines.append("")
        lines.append("[summary]")
        if self.claim_verdicts:
            src = self.scenario.claims[0].source
            for cv in self.claim_verdicts:
                lines.append(f"{src} ~> ({cv.ends[0]}, {cv.ends[1]}): {cv.verdict}")
        else:
            lines.append("no claims; branch tables only")
        lines.append("")
        lines.append("[verdict json]")
        lines.append(json.dumps(self.verdict_json(), indent=2, sort_keys=True))
        lines.append("")
        return "\n".join(lines)


def run(sc: ObstructionScenario) -> RunReport:
    """Execute the whole pipeline; raises on the first failing stage,
    naming the stage."""
    adm: list[str] = []
    ambient = sc.lagrangians[0].ambient_dim
    tau = monotonicity_constant(ambient)
    adm.append(f"ambient CP^{ambient}; shared monotonicity constant tau = {tau}")
    adm.append(f"grading deg T = {sc.grading.t_degree} (step {sc.grading.step}, even): ok")

    granted_of: dict[ClaimDecl, bool] = {}
    with _stage("admissibility"):
        for claim in sc.claims:
            if not (claim.spin and claim.monotone):
                raise AdmissibilityError(
                    f"claim ({claim.ends[0]}, {claim.ends[1]}): the obstruction machinery "
                    "applies to spin monotone cobordisms only")
            decl = next((d for d in sc.intersections
                         if d.pair == claim.ends and d.clean and d.connected), None)
            granted_of[claim] = decl is not None
            if decl is not None:
                adm.append(f"claim {claim.source} ~> ({claim.ends[0]}, {claim.ends[1]}): "
                           f"granted by surgery along the clean connected intersection "
                           f"({decl.pair[0]}, {decl.pair[1]})")
            else:
                adm.append(f"claim {claim.source} ~> ({claim.ends[0]}, {claim.ends[1]}): "
                           "tested against the granted exact sequences")

        probe = sc.lagrangian(sc.probe) if sc.probe else None
        end_names = sorted({name for claim in sc.claims for name in claim.ends})
        if probe is not None and not sc.claims:
            # no claims: tabulate every pair the probe intersects cleanly
            partners = set()
            for decl in sc.intersections:
                if decl.pair[0] == sc.probe:
                    partners.add(decl.pair[1])
                if decl.pair[1] == sc.probe:
                    partners.add(decl.pair[0])
            end_names = sorted(partners)
        pair_list = [(sc.probe, end) for end in end_names] if probe else []
        if probe is not None:
            if probe.maslov is None or probe.maslov <= 3:
                raise AdmissibilityError(
                    f"probe hypothesis: N_K > 3 required, but N({sc.probe}) = {probe.maslov}")
            adm.append(f"probe K = {sc.probe} with N_K = {probe.maslov} > 3: ok")
            for end in end_names:
                lag = sc.lagrangian(end)
                common_grading_check(probe, lag, sc.grading)
                n = pair_maslov(probe, lag)
                adm.append(f"pair ({sc.probe}, {end}): N = gcd({probe.maslov}, "
                           f"{lag.maslov}) = {n}; step {sc.grading.step} divides {n}: ok")
            if sc.claims:
                source = sc.lagrangian(sc.claims[0].source)
                common_grading_check(probe, source, sc.grading)
                if source.maslov is None:
                    adm.append(f"source {source.name}: Maslov number unknown (orientable, "
                               f"even); step {sc.grading.step} certified")
                if sc.grading.step != 2:
                    raise AdmissibilityError(
                        "common-divisor hypothesis: the cobordism Maslov number N_V is "
                        f"unknown (even), so only grading step 2 is certified, "
                        f"not {sc.grading.step}")
                adm.append("cobordism Maslov numbers: unknown (orientable, even); "
                           "step 2 certified")

    hom_lines = []
    with _stage("homology"):
        for key, expr in sc.spaces:
            hom_lines.append(f"space {key} = {describe_space(expr)}: {homology(expr)}")
        for lag in sc.lagrangians:
            if lag.space is None:
                hom_lines.append(f"lagrangian {lag.name}: no homology data declared")
            else:
                hom_lines.append(f"lagrangian {lag.name} = {describe_space(lag.space)}: "
                                 f"{homology(lag.space)}")

    spin_lines = []
    with _stage("spin"):
        for claim in sc.claims:
            if not granted_of[claim] or not claim.spin:
                continue
            decl = sc.intersection_of(*claim.ends)
            first = sc.lagrangian(decl.pair[0])
            second = sc.lagrangian(decl.pair[1])
            for lag in (first, second):
                if not lag.spin:
                    raise AdmissibilityError(
                        f"spin claim ({claim.ends[0]}, {claim.ends[1]}): end {lag.name} "
                        "is not spin")
                if lag.space is None:
                    raise AdmissibilityError(
                        f"spin check for ({claim.ends[0]}, {claim.ends[1]}): end {lag.name} "
                        "has no homology data")
            s_dims = z2_cohomology_dims(homology(decl.space), [1, 2])
            tables = {}
            for lag in (first, second):
                dims = z2_cohomology_dims(homology(lag.space), [1, 2])
                tables[lag.name] = GradedGroup.from_dict(
                    {k: FgAbGroup(0, (2,) * v) for k, v in dims.items() if v})
            s_table = GradedGroup.from_dict(
                {k: FgAbGroup(0, (2,) * v) for k, v in s_dims.items() if v})
            ranks = {k: (s_dims[k] if k in decl.restriction_surjective_degrees else 0)
                     for k in (1, 2)}
            ok = mayer_vietoris_spin_check(tables[first.name], tables[second.name],
                                           s_table, ranks)
            if not ok:
                raise AdmissibilityError(
                    f"spin check for ({claim.ends[0]}, {claim.ends[1]}): restriction to the "
                    "intersection is not declared surjective in degrees 1 and 2; "
                    "w_1 = w_2 = 0 not certified")
            spin_lines.append(
                f"cobordism {claim.source} ~> ({claim.ends[0]}, {claim.ends[1]}): restriction "
                f"H^k({decl.pair[0]}) -> H^k(S) surjective for k in {{1, 2}}; Mayer-Vietoris "
                "forces w_1(V) = w_2(V) = 0: spin certified")

    pair_results: list[PairResult] = []
    with _stage("floer"):
        for _, end in pair_list:
            lag = sc.lagrangian(end)
            decl = sc.intersection_of(sc.probe, end)
            if decl is None:
                raise ScenarioError(
                    f"intersections: no declared intersection for probe pair "
                    f"({sc.probe}, {end})")
            if not (decl.clean and decl.connected):
                raise AdmissibilityError(
                    f"intersection ({decl.pair[0]}, {decl.pair[1]}) must be clean and "
                    "connected for the spectral sequence")
            native = pair_maslov(probe, lag)
            pins = tuple((p.degree, p.group) for p in sc.pins
                         if tuple(sorted(p.pair)) == tuple(sorted((sc.probe, end))))
            tree = solve_floer(homology(decl.space), native, constraints=pins,
                               entry_bound=sc.entry_bound, col_span=sc.window)
            if tree.status == "empty":
                raise SolverLimitError(
                    f"no consistent spectral sequence for pair ({sc.probe}, {end}) under "
                    f"entry bound {sc.entry_bound}; raise entry_bound (this is not an "
                    "infeasibility verdict)")
            pair_results.append(PairResult(
                probe=sc.probe, end=end, native_step=native, tree=tree, folded=[]))

    branch_sets: dict[str, list[tuple[str, tuple[FgAbGroup, FgAbGroup]]]] = {}
    with _stage("coefficients"):
        for pr in pair_results:
            for i, leaf in enumerate(pr.tree.leaves, start=1):
                changed = coefficient_change(leaf.hf, LaurentGrading(-pr.native_step),
                                             sc.grading)
                pr.folded.append((f"branch {i}", (changed.entry(0), changed.entry(1))))
            branch_sets[pr.end] = pr.folded

    claim_verdicts: list[ClaimVerdict] = []
    with _stage("claims"):
        if sc.claims:
            source = sc.lagrangian(sc.claims[0].source)
            cob_claims = [
                CobordismClaim(
                    source=source,
                    ends=(sc.lagrangian(c.ends[0]), sc.lagrangian(c.ends[1])),
                    granted=granted_of[c],
                )
                for c in sc.claims
            ]
            claim_verdicts = certify_nonexistence(cob_claims, branch_sets, probe, sc.grading)

    return RunReport(
        scenario=sc,
        admissibility=adm,
        homology_lines=hom_lines,
        spin_lines=spin_lines,
        pair_results=pair_results,
        claim_verdicts=claim_verdicts,
    )


# ---------------------------------------------------------------------------
# Entry point


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cobcheck",
        description="Decide feasibility of monotone spin Lagrangian cobordism claims.")
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", help="run a scenario file")
    check.add_argument("scenario", help="path to a scenario JSON file")
    check.add_argument("--branch-bound", type=int, default=None,
                       help="override the differential entry bound")
    check.add_argument("--window", type=int, default=None,
                       help="override the column window half-width (in column steps)")
    check.add_argument("--emit-trace", metavar="PATH", default=None,
                       help="write the derivation trace to PATH")
    check.add_argument("--json", dest="json_path", metavar="PATH", default=None,
                       help="write the verdict JSON to PATH")
    args = parser.parse_args(argv)

    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            sc = parse_scenario(fh.read())
        if args.branch_bound is not None or args.window is not None:
            raw = serialize_scenario(sc)
            if args.branch_bound is not None:
                raw["entry_bound"] = args.branch_bound
            if args.window is not None:
                raw["window"] = args.window
            sc = parse_scenario(raw)
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 1
    except ScenarioError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1

    try:
        report = run(sc)
    except (ScenarioError, AdmissibilityError, TopologyError, GradingError,
            UnsupportedProblemError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except SolverLimitError as exc:
        print(f"solver limit: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything unforeseen is an internal error
        print(f"internal error: {exc}", file=sys.stderr)
        return 2

    text = report.text()
    sys.stdout.write(text)
    if args.emit_trace:
        with open(args.emit_trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(report.trace_lines()) + "\n")
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(report.verdict_json(), indent=2, sort_keys=True) + "\n")
    obstructed = any(cv.verdict == "INFEASIBLE" for cv in report.claim_verdicts)
    return 10 if obstructed else 0


if __name__ == "__main__":
    sys.exit(main())
