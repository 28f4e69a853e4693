"""Solver-agnostic linear model container with LP and MPS text formats.

Models hold an objective, named variables with bounds, and named linear
constraints.  The LP dialect follows the widespread CPLEX-style layout
(Maximize / Subject To / Bounds / Binaries / End); the MPS writer emits
the classic fixed sections plus an OBJSENSE extension so the maximization
sense survives a round trip.  Numbers are printed with 12 significant
digits when that representation parses back to the identical float, and
with the full shortest exact representation otherwise, so reparsing a
written file reproduces the coefficient matrix bit for bit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

__all__ = [
    "LinModelError",
    "Variable",
    "LinearConstraint",
    "LinearModel",
    "ModelBuilder",
    "ModelStats",
    "MpsDocument",
    "model_stats",
    "evaluate",
    "same_model",
    "apply_renames",
    "write_lp",
    "read_lp",
    "write_mps",
    "read_mps",
]

BINARY = "B"
CONTINUOUS = "C"

_SENSES = {"<=", ">=", "="}

# LP names: letters, digits, underscore, dot; must not start with a digit
# or dot.  This is the portable subset across LP readers.
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")


class LinModelError(ValueError):
    """Raised for malformed models or unparsable model files."""


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if self.kind not in (BINARY, CONTINUOUS):
            raise LinModelError(f"variable {self.name}: unknown kind {self.kind}")
        if self.lower > self.upper:
            raise LinModelError(
                f"variable {self.name}: lower bound {self.lower} exceeds upper {self.upper}"
            )


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str
    rhs: float

    def __post_init__(self) -> None:
        if self.sense not in _SENSES:
            raise LinModelError(f"constraint {self.name}: unknown sense {self.sense}")


@dataclass(frozen=True)
class LinearModel:
    sense: str
    objective: tuple[tuple[str, float], ...]
    variables: tuple[Variable, ...]
    constraints: tuple[LinearConstraint, ...]
    metadata: Mapping[str, object] = field(default_factory=dict, compare=False)

    def variable(self, name: str) -> Variable:
        return self._by_name[name]

    @property
    def _by_name(self) -> dict[str, Variable]:
        cache = self.__dict__.get("_by_name_cache")
        if cache is None:
            cache = {v.name: v for v in self.variables}
            self.__dict__["_by_name_cache"] = cache
        return cache


class ModelBuilder:
    """Incremental construction with duplicate and dangling-name checks."""

    def __init__(self, sense: str = "max") -> None:
        if sense not in ("max", "min"):
            raise LinModelError(f"unknown objective sense {sense}")
        self.sense = sense
        self._variables: list[Variable] = []
        self._names: set[str] = set()
        self._constraints: list[LinearConstraint] = []
        self._row_names: set[str] = set()

    def add_variable(self, name: str, kind: str, lower: float, upper: float) -> str:
        if name in self._names:
            raise LinModelError(f"duplicate variable {name}")
        self._variables.append(Variable(name, kind, lower, upper))
        self._names.add(name)
        return name

    def add_constraint(
        self,
        name: str,
        terms: Iterable[tuple[str, float]],
        sense: str,
        rhs: float,
    ) -> None:
        if name in self._row_names:
            raise LinModelError(f"duplicate constraint {name}")
        terms = tuple(terms)
        for var, _ in terms:
            if var not in self._names:
                raise LinModelError(f"constraint {name}: unknown variable {var}")
        if not terms:
            raise LinModelError(f"constraint {name}: no terms")
        self._constraints.append(LinearConstraint(name, terms, sense, rhs))
        self._row_names.add(name)

    def build(
        self,
        objective: Iterable[tuple[str, float]],
        metadata: Mapping[str, object] | None = None,
    ) -> LinearModel:
        objective = tuple(objective)
        for var, _ in objective:
            if var not in self._names:
                raise LinModelError(f"objective: unknown variable {var}")
        return LinearModel(
            self.sense,
            objective,
            tuple(self._variables),
            tuple(self._constraints),
            dict(metadata or {}),
        )


@dataclass(frozen=True)
class ModelStats:
    continuous: int
    binary: int
    constraints: int


def model_stats(model: LinearModel) -> ModelStats:
    binary = sum(1 for v in model.variables if v.kind == BINARY)
    return ModelStats(len(model.variables) - binary, binary, len(model.constraints))


def evaluate(
    model: LinearModel,
    values: Mapping[str, float],
    tolerance: float = 1e-6,
) -> tuple[float, list[tuple[str, float]]]:
    """Objective value and violated constraints of a point.

    Missing variables count as 0.  Violations list (constraint name,
    violation magnitude) for every row broken by more than `tolerance`.
    """
    objective = sum(coef * values.get(var, 0.0) for var, coef in model.objective)
    violations: list[tuple[str, float]] = []
    for con in model.constraints:
        lhs = sum(coef * values.get(var, 0.0) for var, coef in con.terms)
        if con.sense == "<=":
            excess = lhs - con.rhs
        elif con.sense == ">=":
            excess = con.rhs - lhs
        else:
            excess = abs(lhs - con.rhs)
        if excess > tolerance:
            violations.append((con.name, excess))
    return objective, violations


def _term_dict(terms: Sequence[tuple[str, float]]) -> dict[str, float]:
    out: dict[str, float] = {}
    for var, coef in terms:
        out[var] = out.get(var, 0.0) + coef
    return out


def same_model(a: LinearModel, b: LinearModel) -> bool:
    """Structural equality: sense, objective, bounds, rows with identical
    coefficients.  Variable declaration order is not significant."""
    if a.sense != b.sense:
        return False
    if _term_dict(a.objective) != _term_dict(b.objective):
        return False
    va = {v.name: (v.kind, v.lower, v.upper) for v in a.variables}
    vb = {v.name: (v.kind, v.lower, v.upper) for v in b.variables}
    if va != vb:
        return False
    if len(a.constraints) != len(b.constraints):
        return False
    for ca, cb in zip(a.constraints, b.constraints):
        if ca.name != cb.name or ca.sense != cb.sense or ca.rhs != cb.rhs:
            return False
        if _term_dict(ca.terms) != _term_dict(cb.terms):
            return False
    return True


def apply_renames(model: LinearModel, renames: Mapping[str, str]) -> LinearModel:
    """Return a copy of ``model`` with variable and row names substituted.

    ``renames`` maps current names to replacements; names absent from the
    mapping stay as they are.  Used to undo the short names that the MPS
    writer assigns, so a reparsed file can be compared against its source."""

    def sub(name: str) -> str:
        return renames.get(name, name)

    variables = tuple(
        Variable(name=sub(v.name), kind=v.kind, lower=v.lower, upper=v.upper)
        for v in model.variables
    )
    objective = tuple((sub(var), coef) for var, coef in model.objective)
    constraints = tuple(
        LinearConstraint(
            name=sub(c.name),
            terms=tuple((sub(var), coef) for var, coef in c.terms),
            sense=c.sense,
            rhs=c.rhs,
        )
        for c in model.constraints
    )
    return LinearModel(
        sense=model.sense,
        objective=objective,
        variables=variables,
        constraints=constraints,
        metadata=model.metadata,
    )


# --- number and name formatting ----------------------------------------


def format_number(x: float) -> str:
    """12 significant digits when exact, else the shortest exact form."""
    if x != x or x in (math.inf, -math.inf):
        raise LinModelError(f"cannot write non-finite coefficient {x}")
    s = "%.12g" % x
    if float(s) == x:
        return s
    return repr(x)


def _check_name(name: str, what: str) -> None:
    if not _NAME_RE.match(name):
        raise LinModelError(f"{what} name {name!r} contains characters unusable in LP files")


# --- LP format ----------------------------------------------------------


def _lp_terms(terms: Sequence[tuple[str, float]]) -> str:
    if not terms:
        return ""
    parts: list[str] = []
    for i, (var, coef) in enumerate(terms):
        mag = format_number(abs(coef))
        sign = "-" if coef < 0 else "+"
        if i == 0:
            lead = "- " if coef < 0 else ""
            parts.append(f"{lead}{mag} {var}")
        else:
            parts.append(f"{sign} {mag} {var}")
    return " ".join(parts)


def _wrap(text: str, indent: str, width: int = 220) -> list[str]:
    words = text.split(" ")
    lines: list[str] = []
    current = ""
    for word in words:
        if current and len(current) + 1 + len(word) > width:
            lines.append(current)
            current = indent + word
        else:
            current = word if not current else current + " " + word
    if current:
        lines.append(current)
    return lines


def write_lp(model: LinearModel) -> str:
    """Serialize to CPLEX-style LP text."""
    for v in model.variables:
        _check_name(v.name, "variable")
    for c in model.constraints:
        _check_name(c.name, "constraint")
    lines: list[str] = []
    comment = model.metadata.get("manifest_digest")
    if comment:
        lines.append(f"\\ manifest {comment}")
    lines.append("Maximize" if model.sense == "max" else "Minimize")
    lines.extend(_wrap(" obj: " + _lp_terms(model.objective), "      "))
    lines.append("Subject To")
    for con in model.constraints:
        rel = {"<=": "<=", ">=": ">=", "=": "="}[con.sense]
        body = f" {con.name}: {_lp_terms(con.terms)} {rel} {format_number(con.rhs)}"
        lines.extend(_wrap(body, "      "))
    bounds = [v for v in model.variables if v.kind == CONTINUOUS]
    if bounds:
        lines.append("Bounds")
        for v in bounds:
            lo = format_number(v.lower)
            if math.isinf(v.upper):
                if v.lower == 0.0:
                    continue
                lines.append(f" {v.name} >= {lo}")
            elif v.lower == v.upper:
                lines.append(f" {v.name} = {lo}")
            else:
                lines.append(f" {lo} <= {v.name} <= {format_number(v.upper)}")
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    if binaries:
        lines.append("Binaries")
        lines.extend(_wrap(" " + " ".join(binaries), "  "))
    lines.append("End")
    return "\n".join(lines) + "\n"


_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


def _tokenize_expr(text: str, where: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-":
            tokens.append(ch)
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(m.group())
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(m.group())
            i = m.end()
            continue
        raise LinModelError(f"{where}: unexpected character {ch!r}")
    return tokens


def _parse_terms(text: str, where: str) -> list[tuple[str, float]]:
    tokens = _tokenize_expr(text, where)
    terms: list[tuple[str, float]] = []
    sign = 1.0
    coef: float | None = None
    for tok in tokens:
        if tok == "+":
            if coef is not None:
                raise LinModelError(f"{where}: dangling coefficient")
        elif tok == "-":
            if coef is not None:
                raise LinModelError(f"{where}: dangling coefficient")
            sign = -sign
        elif _NUMBER_RE.fullmatch(tok):
            if coef is not None:
                raise LinModelError(f"{where}: two numbers in a row")
            coef = sign * float(tok)
            sign = 1.0
        else:
            value = coef if coef is not None else sign
            terms.append((tok, value))
            coef = None
            sign = 1.0
    if coef is not None:
        raise LinModelError(f"{where}: trailing constant term")
    return terms


_SECTION_RE = re.compile(
    r"^\s*(maximize|maximise|minimize|minimise|subject\s+to|st|s\.t\.|bounds|binaries|binary|bin|generals|general|end)\s*$",
    re.IGNORECASE,
)


def read_lp(text: str) -> LinearModel:
    """Parse the LP dialect produced by write_lp (labels required)."""
    lines = []
    for raw in text.splitlines():
        body = raw.split("\\", 1)[0].rstrip()
        lines.append(body)
    sections: dict[str, list[str]] = {}
    current: str | None = None
    sense = "max"
    for line in lines:
        if not line.strip():
            continue
        m = _SECTION_RE.match(line)
        if m:
            key = re.sub(r"\s+", " ", m.group(1).lower())
            if key in ("maximize", "maximise"):
                sense, current = "max", "objective"
            elif key in ("minimize", "minimise"):
                sense, current = "min", "objective"
            elif key in ("subject to", "st", "s.t."):
                current = "constraints"
            elif key == "bounds":
                current = "bounds"
            elif key in ("binaries", "binary", "bin"):
                current = "binaries"
            elif key in ("generals", "general"):
                raise LinModelError("general integer sections are not supported")
            else:
                current = None
            sections.setdefault(current or "end", [])
            continue
        if current is None:
            raise LinModelError(f"content before first section: {line.strip()!r}")
        sections.setdefault(current, []).append(line)

    def split_labeled(chunk: list[str]) -> list[tuple[str, str]]:
        items: list[tuple[str, str]] = []
        for line in chunk:
            stripped = line.strip()
            label_match = re.match(r"([A-Za-z_][A-Za-z0-9_.]*)\s*:", stripped)
            if label_match:
                items.append((label_match.group(1), stripped[label_match.end():]))
            else:
                if not items:
                    raise LinModelError(f"expected a label before {stripped!r}")
                items[-1] = (items[-1][0], items[-1][1] + " " + stripped)
        return items

    obj_items = split_labeled(sections.get("objective", []))
    if len(obj_items) != 1:
        raise LinModelError("expected exactly one labeled objective expression")
    objective = _parse_terms(obj_items[0][1], "objective")

    constraints: list[LinearConstraint] = []
    for name, body in split_labeled(sections.get("constraints", [])):
        m = re.search(r"(<=|>=|=<|=>|=)", body)
        if not m:
            raise LinModelError(f"constraint {name}: missing relation")
        rel = {"=<": "<=", "=>": ">="}.get(m.group(1), m.group(1))
        lhs, rhs_text = body[: m.start()], body[m.end():]
        try:
            rhs = float(rhs_text.strip())
        except ValueError:
            raise LinModelError(f"constraint {name}: right-hand side is not a number") from None
        constraints.append(
            LinearConstraint(name, tuple(_parse_terms(lhs, f"constraint {name}")), rel, rhs)
        )

    lower: dict[str, float] = {}
    upper: dict[str, float] = {}
    for line in sections.get("bounds", []):
        body = line.strip()
        m = re.match(
            r"(?P<lo>[-+]?[\d.eE+-]+)\s*<=\s*(?P<name>[A-Za-z_][\w.]*)\s*<=\s*(?P<hi>[-+]?[\d.eE+-]+)$",
            body,
        )
        if m:
            lower[m.group("name")] = float(m.group("lo"))
            upper[m.group("name")] = float(m.group("hi"))
            continue
        m = re.match(r"(?P<name>[A-Za-z_][\w.]*)\s*(?P<rel><=|>=|=)\s*(?P<val>[-+]?[\d.eE+-]+)$", body)
        if m:
            val = float(m.group("val"))
            if m.group("rel") == "<=":
                upper[m.group("name")] = val
            elif m.group("rel") == ">=":
                lower[m.group("name")] = val
            else:
                lower[m.group("name")] = upper[m.group("name")] = val
            continue
        m = re.match(r"(?P<name>[A-Za-z_][\w.]*)\s+free$", body, re.IGNORECASE)
        if m:
            lower[m.group("name")] = -math.inf
            upper[m.group("name")] = math.inf
            continue
        raise LinModelError(f"unparsable bound line {body!r}")

    binaries: list[str] = []
    for line in sections.get("binaries", []):
        binaries.extend(line.split())
    binary_set = set(binaries)

    order: list[str] = []
    seen: set[str] = set()
    for var, _ in objective:
        if var not in seen:
            order.append(var)
            seen.add(var)
    for con in constraints:
        for var, _ in con.terms:
            if var not in seen:
                order.append(var)
                seen.add(var)
    for name in list(lower) + list(upper) + binaries:
        if name not in seen:
            order.append(name)
            seen.add(name)

    variables = []
    for name in order:
        if name in binary_set:
            variables.append(Variable(name, BINARY, 0.0, 1.0))
        else:
            variables.append(
                Variable(name, CONTINUOUS, lower.get(name, 0.0), upper.get(name, math.inf))
            )
    merged_obj = tuple(_term_dict(objective).items())
    merged_cons = tuple(
        LinearConstraint(c.name, tuple(_term_dict(c.terms).items()), c.sense, c.rhs)
        for c in constraints
    )
    return LinearModel(sense, merged_obj, tuple(variables), merged_cons)


# --- MPS format ---------------------------------------------------------


@dataclass(frozen=True)
class MpsDocument:
    text: str
    renames: dict[str, str]


def _mps_line(fields: Sequence[str]) -> str:
    # Classic fixed layout: fields begin at columns 2, 5, 15, 25, 40, 50.
    starts = [1, 4, 14, 24, 39, 49]
    line = ""
    for start, value in zip(starts, fields):
        if len(line) < start:
            line += " " * (start - len(line))
        elif line:
            line += " "
        line += value
    return line


def write_mps(model: LinearModel) -> MpsDocument:
    """Serialize to fixed MPS; names longer than 8 characters are renamed.

    The rename map (original -> emitted) comes back with the text so a
    sidecar can be written.  OBJSENSE is emitted for maximization, which
    readers lacking the extension should treat as a plain comment-level
    addition; the matrix itself is sense-neutral.
    """
    renames: dict[str, str] = {}
    used: set[str] = {v.name for v in model.variables if len(v.name) <= 8}
    used |= {c.name for c in model.constraints if len(c.name) <= 8}
    used.add("obj")
    counters = {"V": 0, "R": 0}

    def short(name: str, prefix: str) -> str:
        # "obj" is reserved for the objective row.
        if len(name) <= 8 and name != "obj":
            return name
        if name in renames:
            return renames[name]
        while True:
            counters[prefix] += 1
            candidate = f"{prefix}{counters[prefix]:07d}"
            if candidate not in used:
                used.add(candidate)
                renames[name] = candidate
                return candidate

    lines: list[str] = []
    digest = model.metadata.get("manifest_digest")
    if digest:
        lines.append(f"* manifest {digest}")
    lines.append("NAME          MODEL")
    lines.append("OBJSENSE")
    lines.append("    MAX" if model.sense == "max" else "    MIN")
    lines.append("ROWS")
    lines.append(_mps_line(["N", "obj"]))
    row_short = {}
    for con in model.constraints:
        row_short[con.name] = short(con.name, "R")
        kind = {"<=": "L", ">=": "G", "=": "E"}[con.sense]
        lines.append(_mps_line([kind, row_short[con.name]]))

    col_short = {v.name: short(v.name, "V") for v in model.variables}
    obj_coef = _term_dict(model.objective)
    col_rows: dict[str, list[tuple[str, float]]] = {v.name: [] for v in model.variables}
    for con in model.constraints:
        for var, coef in con.terms:
            col_rows[var].append((row_short[con.name], coef))

    lines.append("COLUMNS")
    marker = 0
    integer_open = False
    for v in model.variables:
        entries: list[tuple[str, float]] = []
        if v.name in obj_coef:
            entries.append(("obj", obj_coef[v.name]))
        entries.extend(col_rows[v.name])
        if not entries:
            continue
        if v.kind == BINARY and not integer_open:
            marker += 1
            lines.append(_mps_line(["", f"MARKER{marker}", "'MARKER'", "", "'INTORG'"]))
            integer_open = True
        elif v.kind != BINARY and integer_open:
            marker += 1
            lines.append(_mps_line(["", f"MARKER{marker}", "'MARKER'", "", "'INTEND'"]))
            integer_open = False
        name = col_short[v.name]
        for i in range(0, len(entries), 2):
            chunk = entries[i : i + 2]
            fields = ["", name]
            for row, coef in chunk:
                fields.extend([row, format_number(coef)])
            lines.append(_mps_line(fields))
    if integer_open:
        marker += 1
        lines.append(_mps_line(["", f"MARKER{marker}", "'MARKER'", "", "'INTEND'"]))

    lines.append("RHS")
    rhs_entries = [(row_short[c.name], c.rhs) for c in model.constraints if c.rhs != 0.0]
    for i in range(0, len(rhs_entries), 2):
        chunk = rhs_entries[i : i + 2]
        fields = ["", "RHS"]
        for row, value in chunk:
            fields.extend([row, format_number(value)])
        lines.append(_mps_line(fields))

    lines.append("BOUNDS")
    for v in model.variables:
        name = col_short[v.name]
        if v.kind == BINARY:
            lines.append(_mps_line(["BV", "BND", name]))
            continue
        if v.lower == v.upper:
            lines.append(_mps_line(["FX", "BND", name, format_number(v.lower)]))
            continue
        if v.lower != 0.0:
            if math.isinf(v.lower):
                lines.append(_mps_line(["MI", "BND", name]))
            else:
                lines.append(_mps_line(["LO", "BND", name, format_number(v.lower)]))
        if math.isinf(v.upper):
            lines.append(_mps_line(["PL", "BND", name]))
        else:
            lines.append(_mps_line(["UP", "BND", name, format_number(v.upper)]))
    lines.append("ENDATA")
    return MpsDocument("\n".join(lines) + "\n", dict(renames))


def read_mps(text: str) -> LinearModel:
    """Parse fixed or free MPS as written by write_mps."""
    section = None
    sense = "min"
    objective_row: str | None = None
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    col_order: list[str] = []
    col_kind: dict[str, str] = {}
    col_entries: dict[str, dict[str, float]] = {}
    obj_terms: dict[str, float] = {}
    rhs: dict[str, float] = {}
    lower: dict[str, float] = {}
    upper: dict[str, float] = {}
    explicit_binary: set[str] = set()
    integer_open = False

    pending_objsense = False
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        head = raw[:1].strip()
        if head and not raw[0].isspace():
            parts = raw.split()
            keyword = parts[0].upper()
            if keyword in ("NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA", "OBJSENSE"):
                section = keyword
                pending_objsense = keyword == "OBJSENSE"
                if keyword == "OBJSENSE" and len(parts) > 1:
                    sense = "max" if parts[1].upper().startswith("MAX") else "min"
                    pending_objsense = False
                if keyword == "RANGES":
                    raise LinModelError("RANGES sections are not supported")
                continue
            raise LinModelError(f"unknown MPS section {keyword!r}")
        fields = raw.split()
        if pending_objsense:
            sense = "max" if fields[0].upper().startswith("MAX") else "min"
            pending_objsense = False
            continue
        if section == "ROWS":
            kind, name = fields[0].upper(), fields[1]
            if kind == "N":
                if objective_row is None:
                    objective_row = name
                continue
            row_sense[name] = {"L": "<=", "G": ">=", "E": "="}[kind]
            row_order.append(name)
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1] == "'MARKER'":
                if "'INTORG'" in fields:
                    integer_open = True
                elif "'INTEND'" in fields:
                    integer_open = False
                continue
            name = fields[0]
            if name not in col_entries:
                col_entries[name] = {}
                col_order.append(name)
                col_kind[name] = BINARY if integer_open else CONTINUOUS
            pairs = fields[1:]
            if len(pairs) % 2:
                raise LinModelError(f"odd COLUMNS entry for {name}")
            for row, value in zip(pairs[::2], pairs[1::2]):
                if row == objective_row:
                    obj_terms[name] = obj_terms.get(name, 0.0) + float(value)
                elif row in row_sense:
                    entries = col_entries[name]
                    entries[row] = entries.get(row, 0.0) + float(value)
                else:
                    raise LinModelError(f"COLUMNS references unknown row {row}")
        elif section == "RHS":
            pairs = fields[1:]
            if len(pairs) % 2:
                raise LinModelError("odd RHS entry")
            for row, value in zip(pairs[::2], pairs[1::2]):
                rhs[row] = float(value)
        elif section == "BOUNDS":
            kind = fields[0].upper()
            name = fields[2]
            if name not in col_entries:
                col_entries[name] = {}
                col_order.append(name)
                col_kind[name] = CONTINUOUS
            if kind == "BV":
                explicit_binary.add(name)
            elif kind == "UP":
                upper[name] = float(fields[3])
            elif kind == "LO":
                lower[name] = float(fields[3])
            elif kind == "FX":
                lower[name] = upper[name] = float(fields[3])
            elif kind == "MI":
                lower[name] = -math.inf
            elif kind == "PL":
                upper[name] = math.inf
            else:
                raise LinModelError(f"unsupported bound type {kind}")
        elif section in ("NAME", "ENDATA", None):
            continue

    variables: list[Variable] = []
    for name in col_order:
        if name in explicit_binary:
            variables.append(Variable(name, BINARY, 0.0, 1.0))
        elif col_kind[name] == BINARY:
            lo, hi = lower.get(name, 0.0), upper.get(name, 1.0)
            if (lo, hi) != (0.0, 1.0):
                raise LinModelError(f"general integer variable {name} is not supported")
            variables.append(Variable(name, BINARY, 0.0, 1.0))
        else:
            variables.append(
                Variable(name, CONTINUOUS, lower.get(name, 0.0), upper.get(name, math.inf))
            )
    constraints = tuple(
        LinearConstraint(
            name,
            tuple(
                (col, col_entries[col][name])
                for col in col_order
                if name in col_entries.get(col, {})
            ),
            row_sense[name],
            rhs.get(name, 0.0),
        )
        for name in row_order
    )
    objective = tuple((name, obj_terms[name]) for name in col_order if name in obj_terms)
    return LinearModel(sense, objective, tuple(variables), constraints)
