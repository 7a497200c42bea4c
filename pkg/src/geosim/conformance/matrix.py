"""Coverage rows and the methodology comparison matrix.

A profile marks which lattice concepts a methodology covers, optionally
annotating cells; the containment claim (every profile covers only known
concepts) is enforced structurally at construction. The shipped nine-
methodology fixture regenerates the comparison matrix in a canonical
plain-text form checked in next to it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from geosim.conformance.concepts import AGENT_CONCEPTS, CONCEPT_IDS, GROUPS
from geosim.errors import GeosimError

COVERED = "covered"
UNCOVERED = "uncovered"
ANNOTATED = "annotated"

_MARKS = {COVERED: "X", ANNOTATED: "*", UNCOVERED: ""}


@dataclass(frozen=True)
class MethodologyProfile:
    name: str
    covered: frozenset = frozenset()
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.covered) - set(CONCEPT_IDS)
        unknown |= set(self.notes) - set(CONCEPT_IDS)
        if unknown:
            raise GeosimError(
                f"profile {self.name!r} uses unknown concept ids: "
                f"{sorted(unknown)}")


def check_coverage(profile: MethodologyProfile) -> dict:
    """One mark per concept: covered, annotated (note only), uncovered."""
    row = {}
    for concept in AGENT_CONCEPTS:
        if concept.id in profile.covered:
            row[concept.id] = COVERED
        elif concept.id in profile.notes:
            row[concept.id] = ANNOTATED
        else:
            row[concept.id] = UNCOVERED
    return row


@dataclass(frozen=True)
class CoverageMatrix:
    profiles: tuple
    rows: dict  # concept id -> (mark per profile, in order)

    def render_text(self) -> str:
        names = [p.name for p in self.profiles]
        label_w = max(len("concept"),
                      max(len(cid) + 2 for cid in CONCEPT_IDS),
                      max(len(g) for g in GROUPS))
        widths = [max(len(n), 1) for n in names]
        out = []
        header = "concept".ljust(label_w) + "  " + "  ".join(
            n.ljust(w) for n, w in zip(names, widths))
        out.append(header)
        out.append("-" * len(header))
        for group in GROUPS:
            out.append(group)
            for concept in AGENT_CONCEPTS:
                if concept.group != group:
                    continue
                marks = self.rows[concept.id]
                cells = "  ".join(_MARKS[m].ljust(w)
                                  for m, w in zip(marks, widths))
                out.append(("  " + concept.id).ljust(label_w) + "  " + cells)
        notes = []
        for p in self.profiles:
            for cid in CONCEPT_IDS:
                if cid in p.notes:
                    notes.append(f"* {p.name} {cid}: {p.notes[cid]}")
        if notes:
            out.append("")
            out.extend(notes)
        return "\n".join(line.rstrip() for line in out) + "\n"

    def render_records(self) -> str:
        lines = []
        for concept in AGENT_CONCEPTS:
            for p, mark in zip(self.profiles, self.rows[concept.id]):
                rec = {"concept": concept.id, "group": concept.group,
                       "profile": p.name, "mark": mark}
                if mark == ANNOTATED or concept.id in p.notes:
                    rec["note"] = p.notes.get(concept.id, "")
                lines.append(json.dumps(rec, separators=(",", ":"),
                                        ensure_ascii=False))
        return "\n".join(lines) + "\n"


def matrix(profiles) -> CoverageMatrix:
    names = [p.name for p in profiles]
    if len(names) != len(set(names)):
        raise GeosimError("duplicate profile names")
    rows = {}
    coverage = [check_coverage(p) for p in profiles]
    for cid in CONCEPT_IDS:
        rows[cid] = tuple(c[cid] for c in coverage)
    return CoverageMatrix(tuple(profiles), rows)


def parse_profiles(text: str) -> list[MethodologyProfile]:
    profiles = []
    name = None
    covered: set = set()
    notes: dict = {}

    def flush():
        if name is not None:
            profiles.append(MethodologyProfile(name, frozenset(covered),
                                               dict(notes)))

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "profile":
            flush()
            name = rest.strip()
            covered = set()
            notes = {}
        elif head == "covers":
            covered.update(rest.split())
        elif head == "note":
            cid, _, note = rest.partition(" ")
            notes[cid] = note.strip()
        else:
            raise GeosimError(f"bad profile line: {line!r}")
    flush()
    return profiles


def load_profiles(path) -> list[MethodologyProfile]:
    with open(path, encoding="utf-8") as fh:
        return parse_profiles(fh.read())


def shipped_profiles() -> list[MethodologyProfile]:
    text = (resources.files("geosim.conformance") / "data"
            / "methodologies.profiles").read_text(encoding="utf-8")
    return parse_profiles(text)


def shipped_matrix_text() -> str:
    return (resources.files("geosim.conformance") / "data"
            / "coverage_matrix.txt").read_text(encoding="utf-8")


def profile_from_scenario(doc) -> MethodologyProfile:
    """Which lattice concepts a scenario document exercises.

    Purely declaration-driven: a concept is marked only when the scenario
    text declares the corresponding block, never because the engine could
    exercise it at runtime.
    """
    covered = set()
    agents = doc.agents
    if any(a.perceive for a in agents):
        covered |= {"beliefs", "dynamics.update"}
    if any(a.possibilistic for a in agents):
        covered |= {"beliefs", "preference"}
    if any(a.goals for a in agents):
        covered.add("goals")
        if any(g.kind == "achievement" for a in agents for g in a.goals):
            covered.add("goals.achievement")
        if any(g.kind == "maintenance" for a in agents for g in a.goals):
            covered |= {"goals.maintenance", "dynamics.activation"}
    if any(a.intentions is not None for a in agents):
        covered.add("intention")
    if any(a.prefers for a in agents):
        covered.add("preference")
    if any(a.agree for a in agents):
        covered.add("commitments")
    if any(a.plans for a in agents):
        covered.add("plan")
    if doc.run.dump_agents:
        covered.add("history")
    if any(a.mind is not None for a in agents):
        covered.add("dynamics.planning")
    if any(a.roles for a in agents):
        covered.add("roles")
    if any(a.use_cases for a in agents) or any(
            r.description for a in agents for r in a.roles):
        covered.add("use_case")
    if any(a.decide for a in agents):
        covered.add("skills.abilities")
    from geosim.rules import ast as R
    if any(act.precondition != R.Bool(True)
           for a in agents for act in a.actions):
        covered.add("skills.capabilities")
    return MethodologyProfile("scenario", frozenset(covered), {})
