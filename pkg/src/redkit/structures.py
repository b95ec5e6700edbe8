"""Gallery of canonical truss structures used by demos and tests.

All builders return immutable :class:`~redkit.model.StructuralModel`
instances in meters/kilonewtons. Where a structure carries a ``design``
block, the map encodes a mirror symmetry so shape optimization keeps the
layout symmetric without hardcoding the symmetry anywhere else.
"""

from __future__ import annotations

import numpy as np

from .model import (
    DesignSpec,
    DesignVariable,
    MapEntry,
    Node,
    StructuralModel,
    TrussElement,
)


def three_bar_anchor(ea: float = 1000.0) -> StructuralModel:
    """Three bars fanning from one free node to three anchors above it.

    One redundant bar (n_s = 1). The outer anchors are symmetric design
    variables (they slide horizontally, mirrored), which makes this the
    smallest useful shape-optimization playground.
    """
    nodes = (
        Node(0, (0.0, 0.0), (False, False)),
        Node(1, (-1.0, 1.0), (True, True)),
        Node(2, (0.0, 1.0), (True, True)),
        Node(3, (1.0, 1.0), (True, True)),
    )
    elements = (
        TrussElement(1, 1, 0, ea),
        TrussElement(2, 2, 0, ea),
        TrussElement(3, 3, 0, ea),
    )
    design = DesignSpec(
        variables=(DesignVariable(node=1, axis=0, lower=-1.5, upper=0.7),),
        couplings=(MapEntry(node=3, axis=0, var=0, coeff=-1.0),),
    )
    return StructuralModel(
        dimension=2,
        nodes=nodes,
        elements=elements,
        loads=((0, (0.0, -100.0)),),
        design=design,
    )


def determinate_triangle(ea: float = 1000.0) -> StructuralModel:
    """Statically determinate triangle: n_s = 0, redundancy matrix is zero."""
    nodes = (
        Node(0, (0.0, 0.0), (True, True)),
        Node(1, (1.0, 0.0), (False, True)),
        Node(2, (0.5, 0.8), (False, False)),
    )
    elements = (
        TrussElement(1, 0, 1, ea),
        TrussElement(2, 0, 2, ea),
        TrussElement(3, 1, 2, ea),
    )
    return StructuralModel(dimension=2, nodes=nodes, elements=elements)


def braced_quad_with_tail(ea: float = 1000.0) -> StructuralModel:
    """Doubly braced quad core with a determinate two-bar tail and one bar
    spanning directly between the two supports.

    Element ids are chosen so the didactic cases sit at fixed positions:
    elements 6 and 7 form the determinate tail (zero redundancy), element 8
    connects the two fixed supports (redundancy exactly one).
    """
    nodes = (
        Node(1, (0.0, 1.0), (False, False)),
        Node(2, (1.0, 1.0), (False, False)),
        Node(3, (0.0, 0.0), (True, True)),
        Node(4, (1.0, 0.0), (True, True)),
        Node(5, (2.0, 1.0), (False, False)),
    )
    elements = (
        TrussElement(1, 3, 1, ea),
        TrussElement(2, 4, 2, ea),
        TrussElement(3, 3, 2, ea),
        TrussElement(4, 4, 1, ea),
        TrussElement(5, 1, 2, ea),
        TrussElement(6, 2, 5, ea),
        TrussElement(7, 4, 5, ea),
        TrussElement(8, 3, 4, ea),
    )
    return StructuralModel(
        dimension=2,
        nodes=nodes,
        elements=elements,
        loads=((5, (0.0, -10.0)),),
    )


def spatial_ridge_truss(ea: float = 1000.0) -> StructuralModel:
    """3D ridge truss: three free apex nodes on a spine, anchored to eight
    fixed base nodes; 14 elements, degree of static indeterminacy 5.

    The design block exposes seven variables (end-anchor x/y, end-apex x/z,
    center-apex z); the map mirrors the moving nodes across the transverse
    center plane so the structure stays symmetric while base nodes never
    leave the ground plane.
    """
    fixed = (True, True, True)
    free = (False, False, False)
    nodes = (
        Node(1, (-4.0, 1.5, 0.0), fixed),
        Node(2, (-4.0, -1.5, 0.0), fixed),
        Node(3, (-0.8, 0.8, 0.0), fixed),
        Node(4, (-0.8, -0.8, 0.0), fixed),
        Node(5, (0.8, 0.8, 0.0), fixed),
        Node(6, (0.8, -0.8, 0.0), fixed),
        Node(7, (4.0, 1.5, 0.0), fixed),
        Node(8, (4.0, -1.5, 0.0), fixed),
        Node(9, (-2.5, 0.0, 2.0), free),
        Node(10, (0.0, 0.0, 1.0), free),
        Node(11, (2.5, 0.0, 2.0), free),
    )
    elements = (
        TrussElement(1, 1, 9, ea),
        TrussElement(2, 2, 9, ea),
        TrussElement(3, 3, 9, ea),
        TrussElement(4, 4, 9, ea),
        TrussElement(5, 3, 10, ea),
        TrussElement(6, 4, 10, ea),
        TrussElement(7, 5, 10, ea),
        TrussElement(8, 6, 10, ea),
        TrussElement(9, 5, 11, ea),
        TrussElement(10, 6, 11, ea),
        TrussElement(11, 7, 11, ea),
        TrussElement(12, 8, 11, ea),
        TrussElement(13, 9, 10, ea),
        TrussElement(14, 10, 11, ea),
    )
    # variables: [x1, x2, x9, y1, y2, z9, z10]; mirror partners 7, 8, 11
    design = DesignSpec(
        variables=(
            DesignVariable(node=1, axis=0, lower=-2.0, upper=2.0),
            DesignVariable(node=2, axis=0, lower=-2.0, upper=2.0),
            DesignVariable(node=9, axis=0, lower=-1.5, upper=1.5),
            DesignVariable(node=1, axis=1, lower=-2.0, upper=2.0),
            DesignVariable(node=2, axis=1, lower=-2.0, upper=2.0),
            DesignVariable(node=9, axis=2, lower=-1.2, upper=2.0),
            DesignVariable(node=10, axis=2, lower=-1.2, upper=2.0),
        ),
        couplings=(
            MapEntry(node=7, axis=0, var=0, coeff=-1.0),
            MapEntry(node=7, axis=1, var=3, coeff=1.0),
            MapEntry(node=8, axis=0, var=1, coeff=-1.0),
            MapEntry(node=8, axis=1, var=4, coeff=1.0),
            MapEntry(node=11, axis=0, var=2, coeff=-1.0),
            MapEntry(node=11, axis=2, var=5, coeff=1.0),
        ),
    )
    loads = ((9, (0.0, 0.0, -100.0)), (10, (0.0, 0.0, -100.0)), (11, (0.0, 0.0, -100.0)))
    return StructuralModel(dimension=3, nodes=nodes, elements=elements, loads=loads, design=design)


def modular_bridge(ea: float = 1000.0, stiff_factor: float = 100.0) -> StructuralModel:
    """Two prefabricated X-braced end modules joined on site by four
    midspan elements (ids 13..16); element 14 is the bottom splice with
    ``stiff_factor`` times the stiffness of everything else.

    The site elements carry a 10 % length imperfection. Design variables
    [x2, x5, x6, y5, y6] move one half of the structure; the map mirrors
    the other half, keeps the supports in place and the bottom chord
    straight.
    """
    nodes = (
        Node(1, (0.0, 0.0), (True, True)),
        Node(2, (1.0, 0.0), (False, False)),
        Node(3, (2.0, 0.0), (False, False)),
        Node(4, (3.0, 0.0), (True, True)),
        Node(5, (0.0, 1.0), (False, False)),
        Node(6, (1.0, 1.0), (False, False)),
        Node(7, (2.0, 1.0), (False, False)),
        Node(8, (3.0, 1.0), (False, False)),
    )
    pre = dict(prefab=True)
    site = dict(alpha=0.1)
    elements = (
        TrussElement(1, 1, 2, ea, **pre),
        TrussElement(2, 1, 5, ea, **pre),
        TrussElement(3, 2, 5, ea, **pre),
        TrussElement(4, 2, 6, ea, **pre),
        TrussElement(5, 5, 6, ea, **pre),
        TrussElement(6, 1, 6, ea, **pre),
        TrussElement(7, 3, 4, ea, **pre),
        TrussElement(8, 4, 8, ea, **pre),
        TrussElement(9, 3, 8, ea, **pre),
        TrussElement(10, 3, 7, ea, **pre),
        TrussElement(11, 7, 8, ea, **pre),
        TrussElement(12, 4, 7, ea, **pre),
        TrussElement(13, 2, 7, ea, **site),
        TrussElement(14, 2, 3, ea * stiff_factor, **site),
        TrussElement(15, 6, 7, ea, **site),
        TrussElement(16, 3, 6, ea, **site),
    )
    # variables: [x2, x5, x6, y5, y6]; mirrored partners are nodes 3, 8, 7.
    # Bounds keep the midspan elements at sensible lengths: the strain norm
    # of an imperfect element shrinks with its length, so an unbounded
    # search would collapse the splice instead of redistributing constraint.
    design = DesignSpec(
        variables=(
            DesignVariable(node=2, axis=0, lower=-0.2, upper=0.2),
            DesignVariable(node=5, axis=0, lower=-0.2, upper=0.2),
            DesignVariable(node=6, axis=0, lower=-0.2, upper=0.2),
            DesignVariable(node=5, axis=1, lower=-0.2, upper=0.2),
            DesignVariable(node=6, axis=1, lower=-0.2, upper=0.2),
        ),
        couplings=(
            MapEntry(node=3, axis=0, var=0, coeff=-1.0),
            MapEntry(node=8, axis=0, var=1, coeff=-1.0),
            MapEntry(node=8, axis=1, var=3, coeff=1.0),
            MapEntry(node=7, axis=0, var=2, coeff=-1.0),
            MapEntry(node=7, axis=1, var=4, coeff=1.0),
        ),
    )
    return StructuralModel(
        dimension=2,
        nodes=nodes,
        elements=elements,
        loads=((6, (0.0, -50.0)), (7, (0.0, -50.0))),
        design=design,
    )


def braced_girder_kit(ea: float = 1000.0) -> StructuralModel:
    """Statically determinate girder (prefabricated, elements 1..8) plus a
    kit of four site diagonals 9..12 with prescribed length imperfections
    alpha = (0.1, 0.1, 0.3, -0.3).

    Every intermediate assembly state is kinematically determinate, so all
    orderings of the kit are structurally feasible; they differ only in the
    intermediate strain they provoke.
    """
    # node 2 sits slightly above the support line: a straight two-bar chord
    # between two pins would be a self-stress path and cost the base its
    # determinacy
    nodes = (
        Node(1, (0.0, 0.0), (True, True)),
        Node(2, (1.5, 0.25), (False, False)),
        Node(3, (3.0, 0.0), (True, True)),
        Node(4, (0.5, 1.0), (False, False)),
        Node(5, (1.5, 1.0), (False, False)),
        Node(6, (2.5, 1.0), (False, False)),
    )
    pre = dict(prefab=True)
    elements = (
        TrussElement(1, 1, 2, ea, **pre),
        TrussElement(2, 2, 3, ea, **pre),
        TrussElement(3, 4, 5, ea, **pre),
        TrussElement(4, 5, 6, ea, **pre),
        TrussElement(5, 1, 4, ea, **pre),
        TrussElement(6, 3, 6, ea, **pre),
        TrussElement(7, 2, 5, ea, **pre),
        TrussElement(8, 2, 4, ea, **pre),
        TrussElement(9, 4, 6, ea, alpha=0.1),
        TrussElement(10, 3, 5, ea, alpha=0.1),
        TrussElement(11, 1, 6, ea, alpha=0.3),
        TrussElement(12, 4, 3, ea, alpha=-0.3),
    )
    return StructuralModel(dimension=2, nodes=nodes, elements=elements)


def grid_truss(
    n_cols: int,
    n_rows: int = 2,
    dx: float = 1.0,
    dy: float = 1.0,
    ea: float = 1000.0,
    target_elements: int | None = None,
) -> StructuralModel:
    """Fully braced rectangular grid truss, left column pinned.

    With two rows the element count is 5*n_cols - 4; passing
    ``target_elements`` trims surplus cross diagonals (one per cell, from
    the right) to hit an exact element count while staying stable.
    """
    def nid(r, c):
        return r * n_cols + c

    nodes = []
    for r in range(n_rows):
        for c in range(n_cols):
            fixed = c == 0
            nodes.append(Node(nid(r, c), (c * dx, r * dy), (fixed, fixed)))

    elements = []
    eid = 0
    for r in range(n_rows):
        for c in range(n_cols - 1):
            eid += 1
            elements.append(TrussElement(eid, nid(r, c), nid(r, c + 1), ea))
    for r in range(n_rows - 1):
        for c in range(n_cols):
            eid += 1
            elements.append(TrussElement(eid, nid(r, c), nid(r + 1, c), ea))
    cross = []
    for r in range(n_rows - 1):
        for c in range(n_cols - 1):
            eid += 1
            elements.append(TrussElement(eid, nid(r, c), nid(r + 1, c + 1), ea))
            eid += 1
            cross.append(TrussElement(eid, nid(r + 1, c), nid(r, c + 1), ea))
    elements.extend(cross)

    if target_elements is not None:
        surplus = len(elements) - target_elements
        if surplus < 0 or surplus > len(cross):
            raise ValueError(f"cannot trim {len(elements)} elements down to {target_elements}")
        if surplus:
            drop = {e.id for e in cross[-surplus:]}
            elements = [e for e in elements if e.id not in drop]

    return StructuralModel(dimension=2, nodes=tuple(nodes), elements=tuple(elements))


def random_stable_truss(
    rng: np.random.Generator,
    n_cols: int | None = None,
    jitter: float = 0.25,
    extra_diag_prob: float = 0.5,
    ea_range: tuple[float, float] = (500.0, 2000.0),
) -> StructuralModel:
    """Randomized stable 2D truss: a jittered two-row grid with one
    mandatory diagonal per cell (random orientation) and optional second
    diagonals. Kinematic determinacy is guaranteed by construction
    (pinned left column, every cell braced); n_s varies with the draw.
    """
    n_cols = int(rng.integers(3, 9)) if n_cols is None else n_cols

    def nid(r, c):
        return r * n_cols + c

    nodes = []
    for r in range(2):
        for c in range(n_cols):
            fixed = c == 0
            x = c * 1.0 + (0.0 if fixed else rng.uniform(-jitter, jitter))
            y = r * 1.0 + (0.0 if fixed else rng.uniform(-jitter, jitter))
            nodes.append(Node(nid(r, c), (x, y), (fixed, fixed)))

    def ea():
        return float(rng.uniform(*ea_range))

    elements = []
    eid = 0
    for r in range(2):
        for c in range(n_cols - 1):
            eid += 1
            elements.append(TrussElement(eid, nid(r, c), nid(r, c + 1), ea()))
    for c in range(n_cols):
        eid += 1
        elements.append(TrussElement(eid, nid(0, c), nid(1, c), ea()))
    for c in range(n_cols - 1):
        eid += 1
        if rng.uniform() < 0.5:
            elements.append(TrussElement(eid, nid(0, c), nid(1, c + 1), ea()))
        else:
            elements.append(TrussElement(eid, nid(1, c), nid(0, c + 1), ea()))
        if rng.uniform() < extra_diag_prob:
            eid += 1
            a, b = (nid(1, c), nid(0, c + 1)) if elements[-1].node_a == nid(0, c) else (
                nid(0, c), nid(1, c + 1))
            elements.append(TrussElement(eid, a, b, ea()))

    return StructuralModel(dimension=2, nodes=tuple(nodes), elements=tuple(elements))
