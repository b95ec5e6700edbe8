"""Structural model types, the JSON model format, and validation.

Units are fixed throughout the package: coordinates in meters, forces in
kilonewtons, axial stiffness EA in kN. Reports echo elongations in
micrometers where that is the customary scale.

The on-disk model format is a single JSON document::

    {
      "dimension": 2,
      "nodes":    [{"id": 0, "coords": [0.0, 0.0], "support": [true, true]}, ...],
      "elements": [{"id": 1, "nodes": [0, 3], "EA": 1000.0,
                    "alpha": 0.0, "prefab": false}, ...],
      "loads":    [{"node": 3, "vector": [0.0, -100.0]}],
      "design":   {"variables": [{"node": 1, "axis": "x",
                                  "lower": -1.0, "upper": 1.0}, ...],
                   "map": [{"node": 2, "axis": "x", "var": 0, "coeff": -1.0}, ...]}
    }

``support`` is a per-axis list of booleans (true = fixed); omitted means
free. ``alpha`` is the relative length imperfection of the element,
``prefab`` marks elements that belong to a prefabricated base and are
treated as geometrically perfect. The optional ``design`` block declares
shape-optimization variables: each variable moves one (node, axis) by the
variable value, and ``map`` entries add further linear couplings
``coeff * s[var]`` onto other (node, axis) coordinates, which is how
symmetry constraints are expressed without hardcoding any one symmetry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

AXIS_NAMES = ("x", "y", "z")


class ModelError(Exception):
    """Raised when a model document is malformed or inconsistent."""


@dataclass(frozen=True)
class Node:
    id: int
    coords: tuple[float, ...]
    support: tuple[bool, ...]  # per-axis, True = fixed


@dataclass(frozen=True)
class TrussElement:
    id: int
    node_a: int
    node_b: int
    ea: float  # axial stiffness EA [kN]
    alpha: float = 0.0  # relative length imperfection
    prefab: bool = False


@dataclass(frozen=True)
class DesignVariable:
    node: int
    axis: int
    lower: float = -math.inf
    upper: float = math.inf


@dataclass(frozen=True)
class MapEntry:
    node: int
    axis: int
    var: int
    coeff: float


@dataclass(frozen=True)
class DesignSpec:
    """Shape-design space: variables plus linear couplings (symmetry map)."""

    variables: tuple[DesignVariable, ...]
    couplings: tuple[MapEntry, ...] = ()

    @property
    def size(self) -> int:
        return len(self.variables)


@dataclass(frozen=True)
class StructuralModel:
    """Immutable truss model. Node/element ids are the user-facing ids;
    dense 0-based indices are exposed via :meth:`node_index` and
    :meth:`element_index` for matrix work."""

    dimension: int
    nodes: tuple[Node, ...]
    elements: tuple[TrussElement, ...]
    loads: tuple[tuple[int, tuple[float, ...]], ...] = ()
    design: DesignSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "_node_pos", {n.id: i for i, n in enumerate(self.nodes)})
        object.__setattr__(self, "_elem_pos", {e.id: i for i, e in enumerate(self.elements)})

    # -- index helpers -----------------------------------------------------

    def node_index(self, node_id: int) -> int:
        return self._node_pos[node_id]

    def element_index(self, element_id: int) -> int:
        return self._elem_pos[element_id]

    def node(self, node_id: int) -> Node:
        return self.nodes[self._node_pos[node_id]]

    def element(self, element_id: int) -> TrussElement:
        return self.elements[self._elem_pos[element_id]]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def element_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.elements)

    # -- geometry ----------------------------------------------------------

    def element_length(self, element_id: int) -> float:
        e = self.element(element_id)
        a = np.asarray(self.node(e.node_a).coords)
        b = np.asarray(self.node(e.node_b).coords)
        return float(np.linalg.norm(b - a))

    def element_lengths(self) -> np.ndarray:
        return np.array([self.element_length(e.id) for e in self.elements])

    def coords_array(self) -> np.ndarray:
        return np.array([n.coords for n in self.nodes], dtype=float)

    # -- derived models ----------------------------------------------------

    def with_coords(self, coords: np.ndarray) -> "StructuralModel":
        """New model with node coordinates replaced (same order as .nodes)."""
        nodes = tuple(
            replace(n, coords=tuple(float(x) for x in coords[i]))
            for i, n in enumerate(self.nodes)
        )
        return replace(self, nodes=nodes)

    def without_elements(self, element_ids) -> "StructuralModel":
        """New model with the given elements removed; nodes untouched."""
        drop = set(element_ids)
        missing = drop - set(self._elem_pos)
        if missing:
            raise ModelError(f"unknown element ids: {sorted(missing)}")
        return replace(self, elements=tuple(e for e in self.elements if e.id not in drop))

    def restricted_to_elements(self, element_ids) -> "StructuralModel":
        """Submodel with only the given elements and the nodes they reference.

        Used for partial assembly states: nodes not yet reached by any
        element do not exist in the partial structure.
        """
        keep = set(element_ids)
        missing = keep - set(self._elem_pos)
        if missing:
            raise ModelError(f"unknown element ids: {sorted(missing)}")
        elements = tuple(e for e in self.elements if e.id in keep)
        used = {e.node_a for e in elements} | {e.node_b for e in elements}
        nodes = tuple(n for n in self.nodes if n.id in used)
        loads = tuple((nid, vec) for nid, vec in self.loads if nid in used)
        return replace(self, nodes=nodes, elements=elements, loads=loads)

    def with_alpha(self, alpha_by_id: dict[int, float]) -> "StructuralModel":
        """New model with imperfection factors overridden per element id."""
        unknown = set(alpha_by_id) - set(self._elem_pos)
        if unknown:
            raise ModelError(f"unknown element ids: {sorted(unknown)}")
        elements = tuple(
            replace(e, alpha=float(alpha_by_id.get(e.id, e.alpha))) for e in self.elements
        )
        return replace(self, elements=elements)

    def alphas(self) -> np.ndarray:
        """Imperfection factors per element; prefab elements count as perfect."""
        return np.array([0.0 if e.prefab else e.alpha for e in self.elements])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    code: str
    message: str


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, code: str, message: str) -> None:
        self.findings.append(Finding(code, message))

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def __str__(self) -> str:
        if self.ok:
            return "model ok"
        return "\n".join(f"[{f.code}] {f.message}" for f in self.findings)


def validate_model(model: StructuralModel) -> ValidationReport:
    """Collect violations of the structural sanity invariants.

    Findings are deterministic and sorted, independent of input ordering.
    An empty report means the model is well-formed (it may still be
    kinematically indeterminate; that is a matrix-level property checked
    when the analysis matrices are built).
    """
    rep = ValidationReport()
    dim = model.dimension

    if dim not in (2, 3):
        rep.add("bad-dimension", f"dimension must be 2 or 3, got {dim}")
        return rep

    node_ids = [n.id for n in model.nodes]
    for nid in sorted({i for i in node_ids if node_ids.count(i) > 1}):
        rep.add("duplicate-node-id", f"node id {nid} appears more than once")
    for n in model.nodes:
        if len(n.coords) != dim:
            rep.add("bad-coords", f"node {n.id}: expected {dim} coordinates, got {len(n.coords)}")
        if len(n.support) != dim:
            rep.add("bad-support", f"node {n.id}: expected {dim} support flags, got {len(n.support)}")

    known = set(node_ids)
    elem_ids = [e.id for e in model.elements]
    for eid in sorted({i for i in elem_ids if elem_ids.count(i) > 1}):
        rep.add("duplicate-element-id", f"element id {eid} appears more than once")

    for e in sorted(model.elements, key=lambda e: e.id):
        if e.node_a not in known or e.node_b not in known:
            rep.add("dangling-reference", f"element {e.id} references a missing node")
            continue
        if e.node_a == e.node_b:
            rep.add("degenerate-element", f"element {e.id} connects node {e.node_a} to itself")
        if e.ea <= 0:
            rep.add("nonpositive-stiffness", f"element {e.id}: EA must be positive, got {e.ea}")
        if model.element_length(e.id) <= 0:
            rep.add("zero-length-element", f"element {e.id} has zero length")
        if not abs(e.alpha) < 1:
            rep.add("imperfection-range", f"element {e.id}: |alpha| must be < 1, got {e.alpha}")

    for nid, vec in sorted(model.loads):
        if nid not in known:
            rep.add("dangling-reference", f"load references missing node {nid}")
        if len(vec) != dim:
            rep.add("bad-load", f"load on node {nid}: expected {dim} components")

    # every translational axis needs at least one fixed component overall
    for axis in range(dim):
        if not any(len(n.support) == dim and n.support[axis] for n in model.nodes):
            rep.add("rigid-body-mode", f"no support constrains the {AXIS_NAMES[axis]} axis")

    n_free = sum(
        1
        for n in model.nodes
        if len(n.support) == dim
        for axis in range(dim)
        if not n.support[axis]
    )
    if model.nodes and n_free == 0:
        rep.add("no-free-dofs", "every degree of freedom is fixed")

    if model.design is not None:
        for i, v in enumerate(model.design.variables):
            if v.node not in known:
                rep.add("dangling-reference", f"design variable {i} references missing node {v.node}")
            if not 0 <= v.axis < dim:
                rep.add("bad-design", f"design variable {i}: axis out of range")
        for m in model.design.couplings:
            if m.node not in known:
                rep.add("dangling-reference", f"design map entry references missing node {m.node}")
            if not 0 <= m.axis < dim:
                rep.add("bad-design", "design map entry: axis out of range")
            if not 0 <= m.var < model.design.size:
                rep.add("bad-design", f"design map entry references variable {m.var} out of range")

    rep.findings.sort(key=lambda f: (f.code, f.message))
    return rep


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

_HARD_ERRORS = {
    "dangling-reference",
    "nonpositive-stiffness",
    "zero-length-element",
    "degenerate-element",
    "duplicate-node-id",
    "duplicate-element-id",
    "bad-coords",
    "bad-support",
    "bad-load",
    "bad-dimension",
    "bad-design",
}


def _require(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise ModelError(f"{path}: missing required key '{key}'")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ModelError(f"{path}.{key}: expected a number, got {type(value).__name__}")
        return float(value)
    if not isinstance(value, kind):
        raise ModelError(f"{path}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _axis_index(value, dim: int, path: str) -> int:
    if isinstance(value, str):
        if value not in AXIS_NAMES[:dim]:
            raise ModelError(f"{path}: unknown axis '{value}'")
        return AXIS_NAMES.index(value)
    if isinstance(value, int) and 0 <= value < dim:
        return value
    raise ModelError(f"{path}: axis must be one of {AXIS_NAMES[:dim]} or 0..{dim - 1}")


def parse_model(document: str | dict) -> StructuralModel:
    """Parse and validate a model document (JSON text or parsed dict).

    Raises :class:`ModelError` on schema violations, dangling references,
    non-positive stiffness, and zero-length elements. Soft findings (alpha
    out of range, missing supports) do not block parsing; run
    :func:`validate_model` to collect them.
    """
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")

    dim = _require(doc, "dimension", int, "$")
    if dim not in (2, 3):
        raise ModelError(f"$.dimension: must be 2 or 3, got {dim}")

    nodes = []
    for i, nd in enumerate(_require(doc, "nodes", list, "$")):
        path = f"$.nodes[{i}]"
        if not isinstance(nd, dict):
            raise ModelError(f"{path}: expected object")
        nid = _require(nd, "id", int, path)
        coords = _require(nd, "coords", list, path)
        if len(coords) != dim or not all(isinstance(c, (int, float)) for c in coords):
            raise ModelError(f"{path}.coords: expected {dim} numbers")
        support = nd.get("support", [False] * dim)
        if not isinstance(support, list) or len(support) != dim or not all(
            isinstance(s, bool) for s in support
        ):
            raise ModelError(f"{path}.support: expected {dim} booleans")
        nodes.append(Node(id=nid, coords=tuple(float(c) for c in coords), support=tuple(support)))
    nodes.sort(key=lambda n: n.id)

    elements = []
    for i, ed in enumerate(_require(doc, "elements", list, "$")):
        path = f"$.elements[{i}]"
        if not isinstance(ed, dict):
            raise ModelError(f"{path}: expected object")
        eid = _require(ed, "id", int, path)
        pair = _require(ed, "nodes", list, path)
        if len(pair) != 2 or not all(isinstance(p, int) for p in pair):
            raise ModelError(f"{path}.nodes: expected two node ids")
        ea = _require(ed, "EA", float, path)
        alpha = ed.get("alpha", 0.0)
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
            raise ModelError(f"{path}.alpha: expected a number")
        prefab = ed.get("prefab", False)
        if not isinstance(prefab, bool):
            raise ModelError(f"{path}.prefab: expected a boolean")
        elements.append(
            TrussElement(id=eid, node_a=pair[0], node_b=pair[1], ea=ea,
                         alpha=float(alpha), prefab=prefab)
        )
    elements.sort(key=lambda e: e.id)

    loads = []
    for i, ld in enumerate(doc.get("loads", [])):
        path = f"$.loads[{i}]"
        if not isinstance(ld, dict):
            raise ModelError(f"{path}: expected object")
        nid = _require(ld, "node", int, path)
        vec = _require(ld, "vector", list, path)
        if len(vec) != dim or not all(isinstance(c, (int, float)) for c in vec):
            raise ModelError(f"{path}.vector: expected {dim} numbers")
        loads.append((nid, tuple(float(c) for c in vec)))

    design = None
    if "design" in doc:
        dd = doc["design"]
        if not isinstance(dd, dict):
            raise ModelError("$.design: expected object")
        variables = []
        for i, vd in enumerate(_require(dd, "variables", list, "$.design")):
            path = f"$.design.variables[{i}]"
            if not isinstance(vd, dict):
                raise ModelError(f"{path}: expected object")
            variables.append(
                DesignVariable(
                    node=_require(vd, "node", int, path),
                    axis=_axis_index(vd.get("axis"), dim, f"{path}.axis"),
                    lower=float(vd.get("lower", -math.inf)),
                    upper=float(vd.get("upper", math.inf)),
                )
            )
        couplings = []
        for i, md in enumerate(dd.get("map", [])):
            path = f"$.design.map[{i}]"
            if not isinstance(md, dict):
                raise ModelError(f"{path}: expected object")
            couplings.append(
                MapEntry(
                    node=_require(md, "node", int, path),
                    axis=_axis_index(md.get("axis"), dim, f"{path}.axis"),
                    var=_require(md, "var", int, path),
                    coeff=_require(md, "coeff", float, path),
                )
            )
        design = DesignSpec(variables=tuple(variables), couplings=tuple(couplings))

    model = StructuralModel(
        dimension=dim,
        nodes=tuple(nodes),
        elements=tuple(elements),
        loads=tuple(loads),
        design=design,
    )

    report = validate_model(model)
    hard = [f for f in report.findings if f.code in _HARD_ERRORS]
    if hard:
        raise ModelError("; ".join(f"[{f.code}] {f.message}" for f in hard))
    return model


def model_to_dict(model: StructuralModel) -> dict:
    """Canonical dict form of a model (inverse of :func:`parse_model`)."""
    doc: dict = {
        "dimension": model.dimension,
        "nodes": [
            {"id": n.id, "coords": list(n.coords), "support": list(n.support)}
            for n in model.nodes
        ],
        "elements": [
            {
                "id": e.id,
                "nodes": [e.node_a, e.node_b],
                "EA": e.ea,
                "alpha": e.alpha,
                "prefab": e.prefab,
            }
            for e in model.elements
        ],
        "loads": [{"node": nid, "vector": list(vec)} for nid, vec in model.loads],
    }
    if model.design is not None:
        doc["design"] = {
            "variables": [
                {
                    "node": v.node,
                    "axis": AXIS_NAMES[v.axis],
                    **({"lower": v.lower} if math.isfinite(v.lower) else {}),
                    **({"upper": v.upper} if math.isfinite(v.upper) else {}),
                }
                for v in model.design.variables
            ],
            "map": [
                {"node": m.node, "axis": AXIS_NAMES[m.axis], "var": m.var, "coeff": m.coeff}
                for m in model.design.couplings
            ],
        }
    return doc


def serialize_model(model: StructuralModel) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n"


def load_model(path) -> StructuralModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def save_model(model: StructuralModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_model(model))


def apply_design_vector(model: StructuralModel, s: np.ndarray) -> StructuralModel:
    """Model with coordinates perturbed by the design vector ``s``.

    Each variable moves its own (node, axis) by ``s[i]``; map entries add
    ``coeff * s[var]`` on top. Supports and topology are unchanged, so a
    support stays a support wherever it ends up.
    """
    if model.design is None:
        raise ModelError("model has no design block")
    s = np.asarray(s, dtype=float)
    if s.shape != (model.design.size,):
        raise ModelError(f"design vector must have length {model.design.size}")
    coords = model.coords_array()
    for i, v in enumerate(model.design.variables):
        coords[model.node_index(v.node), v.axis] += s[i]
    for m in model.design.couplings:
        coords[model.node_index(m.node), m.axis] += m.coeff * s[m.var]
    return model.with_coords(coords)
