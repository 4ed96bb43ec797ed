"""
domination.py

Constructive sparse domination by stopping time.

All three algorithms share one skeleton. Starting from the root cube Q₀ = [0,1)^n,
every node Q gets an exceptional-set ratio per cell (the worst of its
threshold quantities divided by their normalizers). The stopping constant D
starts at 1 and doubles until at most 2^{-(n+2)}|Q| cells exceed it; the
children are the Calderón-Zygmund cubes of χ_E at level 2^{-(n+1)} inside Q.
Nodes are processed first-in first-out; a node is a leaf when f vanishes on
27Q or Q is a single cell. Once the children of a node are known, an algorithm
may ask for a larger D at that node (the composition does so until D also
bounds the near pieces T1(χ_{9P} T2(f χ_{27Q₀∖27P})) on every child P).

- dominate_composition           |∫ g T1T2 f|     vs  𝓐_{L(log L)²,L¹} + 𝓐_{L log L,L log L}
- dominate_maximal_composition   ∫ |g| M T1T2 f   vs  𝓐_{L(log L)²,L¹} + q' 𝓐_{L log L,L^q}
- sparse_dominate_single         M_{L(log L)^k} T f  vs  Σ_Q ‖f‖_{L(log L)^{k+1},27Q} χ_{27Q}

The returned family is the tree (certificates E_Q = Q minus its children,
η >= 1/2) and its clipped 27-dilates with the same certificates (η >= 27^{-n}/2).

Created: July 29, 2025
"""

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from decomp.calderon_zygmund import stopping_cubes
from grid.cubes import cube_cells, dilate, root_cube
from grid.errors import GeometryMismatchError, InvalidParameterError
from kernels.operators import apply_values
from maximal.grand_maximal import (
    local_bisublinear,
    local_double_star,
    local_double_star_M,
    local_grand_maximal,
    local_star_k,
)
from maximal.maximal_operators import MaximalSpec, maximal_values
from orlicz.local_norms import LocalFunctional, luxemburg_values, power_values
from sparse.families import SparseFamily, certify, sparse_form

logger = logging.getLogger(__name__)

D_FLAG = 2.0 ** 20
D_CEILING = 2.0 ** 64


@dataclass
class StoppingNode:
    """
    One node of the stopping tree.

    Attributes:
        cube (Cube): Q
        parent (int): Index of the parent node, -1 for the root
        depth (int): Generation below the root
        D (float): Stopping constant chosen at this node, possibly raised by
            the children hook
        exceptional_fraction (float): |E|/|Q| after D selection
        norms (tuple[float, ...]): Normalizers of the thresholds at this node
        vanishing (bool): f vanishes on 27Q (node contributes nothing)
        children (list[int]): Indices of the child nodes
    """

    cube: object
    parent: int
    depth: int
    D: float = 1.0
    exceptional_fraction: float = 0.0
    norms: tuple = ()
    vanishing: bool = False
    children: list = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class DominationReport:
    """
    Attributes:
        nodes (tuple[StoppingNode, ...]): Stopping tree in FIFO order
        family (SparseFamily): Non-vanishing tree nodes, E_Q = Q minus children
        dilated (SparseFamily): Their clipped 27-dilates with the same certificates
        D (float): Largest node constant
        flagged (bool): D exceeded 2^20
    """

    nodes: tuple
    family: SparseFamily
    dilated: SparseFamily
    D: float
    flagged: bool

    def level_fractions(self):
        """Largest exceptional-set fraction per tree depth."""
        out = {}
        for node in self.nodes:
            out[node.depth] = max(out.get(node.depth, 0.0), node.exceptional_fraction)
        return out


def threshold_ratio(quantity, normalizer):
    """quantity/normalizer cellwise with 0/0 = 0 and q/0 = inf for q > 0."""
    quantity = np.abs(np.asarray(quantity, dtype=float))
    if normalizer > 0:
        return quantity / normalizer
    return np.where(quantity > 0, np.inf, 0.0)


def select_stopping_constant(ratios, n):
    """Smallest D = 2^j >= 1 with #{ratio > D} <= floor(2^{-(n+2)} #cells)."""
    allowed = int(np.floor(ratios.size * 2.0 ** (-(n + 2))))
    D = 1.0
    while np.count_nonzero(ratios > D) > allowed and D < D_CEILING:
        D *= 2.0
    return D


def raise_stopping_constant(D, required):
    """Double D until it reaches `required` (capped at 2^64)."""
    while D < required and D < D_CEILING:
        D *= 2.0
    return D


def _masked(f, cells):
    out = np.zeros_like(f.values)
    out[cells] = f.values[cells]
    return out


def run_stopping_tree(f, evaluate_node, periodic=False, on_children=None):
    """
    Generic stopping-time recursion.

    Parameters:
        f (GridFunction): Input
        evaluate_node (callable): cube -> (ratios over cube_cells(cube), norms)
        periodic (bool): Wrap the 27-dilates
        on_children (callable | None): (node index, cube, child cubes) hook; may
            return the smallest D the node needs given its children

    Returns:
        DominationReport
    """
    n, level = f.n, f.level
    stop_level = 2.0 ** (-(n + 1))
    nodes = []
    queue = deque([(root_cube(n, level), -1, 0)])

    while queue:
        cube, parent, depth = queue.popleft()
        index = len(nodes)
        node = StoppingNode(cube, parent, depth)
        nodes.append(node)
        if parent >= 0:
            nodes[parent].children.append(index)

        cells27 = cube_cells(dilate(cube, 27, periodic), periodic)
        if not np.any(f.values[cells27]):
            node.vanishing = True
            continue

        ratios, node.norms = evaluate_node(cube)
        node.D = select_stopping_constant(ratios, n)
        exceptional = ratios > node.D
        node.exceptional_fraction = float(np.count_nonzero(exceptional)) / ratios.size
        children = []
        if cube.side > 1:
            indicator = np.zeros(f.values.size)
            indicator[cube_cells(cube)[exceptional]] = 1.0
            children = stopping_cubes(indicator, n, level, stop_level, root=cube, include_root=False)
            if on_children is not None:
                required = on_children(index, cube, children)
                if required is not None and required > node.D:
                    logger.debug("raising D at %s from %g for %.6g", cube.offsets, node.D, required)
                    node.D = raise_stopping_constant(node.D, required)
        if node.D > D_FLAG:
            logger.warning("stopping constant %g at %s exceeds 2^20", node.D, cube.offsets)
        for child in children:
            queue.append((child, index, depth + 1))

    return _report(nodes, periodic)


def _report(nodes, periodic):
    live = [node for node in nodes if not node.vanishing]
    certificates = []
    for node in live:
        cells = cube_cells(node.cube)
        taken = np.zeros(cells.size, dtype=bool)
        for child in node.children:
            taken |= np.isin(cells, cube_cells(nodes[child].cube))
        certificates.append(cells[~taken])
    cubes = tuple(node.cube for node in live)
    family = SparseFamily(cubes, tuple(certificates), 0.5)
    dilated = SparseFamily(
        tuple(dilate(q, 27, periodic) for q in cubes), tuple(certificates), 0.5 * 27.0 ** (-(cubes[0].n if cubes else 1))
    )
    D = max((node.D for node in live), default=1.0)
    logger.info("stopping tree: %d nodes, %d in family, D=%g", len(nodes), len(live), D)
    return DominationReport(tuple(nodes), family, dilated, D, D > D_FLAG)


# --- shared quantities ------------------------------------------------------------


def _check_geometry(f, *ops):
    for op in ops:
        op.require_geometry(f)


def _composition(first, second, values):
    return apply_values(first, apply_values(second, values[None, :]))[0]


def _average_spec(family):
    return MaximalSpec(LocalFunctional.average(), family)


@dataclass(frozen=True)
class DominationSides:
    """
    Attributes:
        lhs (float): Left side of the domination
        rhs_core (float): Sum of the sparse forms (without D)
        D (float): Stopping constant
        ratio (float): lhs/(D·rhs_core), 0 when the right side vanishes
        certified_bound (float | None): Bound proved by the stopping rule
        certified_ratio (float | None): lhs/certified_bound
    """

    lhs: float
    rhs_core: float
    D: float
    ratio: float
    certified_bound: float | None = None
    certified_ratio: float | None = None

    @property
    def rhs(self):
        return self.D * self.rhs_core


def _ratio(lhs, rhs):
    return lhs / rhs if rhs > 0 else 0.0


# --- composition T1T2 -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CompositionDomination:
    """
    Result of dominate_composition.

    `a_total`, `b_total` and `c_total` are the stopping, far and near pieces of
    the telescoping decomposition of T1T2 f; their sum equals T1T2 f. Every
    node constant bounds the near pieces on its children, so both the plain
    ratio and the certified ratio are at most 1.
    """

    report: DominationReport
    f: object
    t1t2f: np.ndarray
    a_total: np.ndarray
    b_total: np.ndarray
    c_total: np.ndarray

    @property
    def family(self):
        return self.report.family

    @property
    def D(self):
        return self.report.D

    def residual(self):
        """max |T1T2 f - (A + B + C)| over the cells."""
        return float(np.abs(self.t1t2f - self.a_total - self.b_total - self.c_total).max())

    def evaluate(self, g):
        """
        Both sides of |∫ g T1T2 f| <= D(𝓐_{L(log L)²,L¹} + 𝓐_{L log L,L log L}) on the
        27-dilated family, plus the bound certified by the stopping rule.
        """
        self.f.require_geometry(g)
        h = self.f.cell_measure
        lhs = abs(float(np.dot(g.values, self.t1t2f)) * h)
        rhs_core = sparse_form(
            self.report.dilated, self.f, g, LocalFunctional.luxemburg(2), LocalFunctional.average()
        ) + sparse_form(self.report.dilated, self.f, g, LocalFunctional.luxemburg(1), LocalFunctional.luxemburg(1))

        bound = self._certified_terms(np.abs(g.values)) + abs(float(np.dot(g.values, self.c_total)) * h)
        return DominationSides(
            lhs=lhs,
            rhs_core=rhs_core,
            D=self.D,
            ratio=_ratio(lhs, self.D * rhs_core),
            certified_bound=bound,
            certified_ratio=_ratio(lhs, bound),
        )

    def _certified_terms(self, abs_g):
        """Σ_Q D_Q ‖f‖_{L(log L)²,27Q} ∫_{Q∖∪P}|g| + Σ_P D_Q ‖f‖_{L log L,27Q} ∫_P|g|."""
        h = self.f.cell_measure
        nodes = self.report.nodes
        total = 0.0
        for node in nodes:
            if node.vanishing:
                continue
            cells = cube_cells(node.cube)
            taken = np.zeros(cells.size, dtype=bool)
            for child in node.children:
                child_cells = cube_cells(nodes[child].cube)
                taken |= np.isin(cells, child_cells)
                total += node.D * node.norms[2] * abs_g[child_cells].sum() * h
            total += node.D * node.norms[0] * abs_g[cells[~taken]].sum() * h
        return total


def dominate_composition(first, second, f, periodic=False):
    """
    Sparse domination of the composition T1T2 (g-free construction).

    Thresholds at a node Q₀:
        |T1T2(f χ_{27Q₀})|       against ‖f‖_{L(log L)²,27Q₀}
        𝓜_{T2,Q₀} f              against ⟨|f|⟩_{27Q₀}
        𝓜**_{T1T2;Q₀} f          against ‖f‖_{L log L,27Q₀}
    After the children P are chosen, D at Q₀ is raised until
        |T1(χ_{9P} T2(f χ_{27Q₀∖27P}))| on P  is at most  D‖f‖_{L log L,27Q₀}

    Parameters:
        first, second (KernelOperator): T1 and T2
        f (GridFunction): Input supported in the domain

    Returns:
        CompositionDomination
    """
    _check_geometry(f, first, second)
    size = f.values.size
    a_total = np.zeros(size)
    b_total = np.zeros(size)
    c_total = np.zeros(size)
    node_values = {}

    def evaluate_node(cube):
        cells = cube_cells(cube)
        cells27 = cube_cells(dilate(cube, 27, periodic), periodic)
        local = f.values[cells27]
        norms = (luxemburg_values(local, 2), float(np.abs(local).mean()), luxemburg_values(local, 1))
        full = _composition(first, second, _masked(f, cells27))
        node_values[cube] = (full, cells27, norms[2])
        ratios = np.maximum.reduce([
            threshold_ratio(full[cells], norms[0]),
            threshold_ratio(local_grand_maximal(second, f, cube, periodic).values[cells], norms[1]),
            threshold_ratio(local_double_star(first, second, f, cube, periodic).values[cells], norms[2]),
        ])
        return ratios, norms

    def on_children(index, cube, children):
        full, cells27, near_norm = node_values[cube]
        cells = cube_cells(cube)
        rest = np.ones(size, dtype=bool)
        required = 0.0
        for child in children:
            child_cells = cube_cells(child)
            rest[child_cells] = False
            source = np.zeros(size, dtype=bool)
            source[cells27] = True
            source[cube_cells(dilate(child, 27, periodic), periodic)] = False
            u = apply_values(second, (f.values * source)[None, :])[0]
            near = np.zeros(size, dtype=bool)
            near[cube_cells(dilate(child, 9, periodic), periodic)] = True
            far_part = apply_values(first, (u * ~near)[None, :])[0]
            near_part = apply_values(first, (u * near)[None, :])[0]
            b_total[child_cells] += far_part[child_cells]
            c_total[child_cells] += near_part[child_cells]
            required = max(required, float(threshold_ratio(near_part[child_cells], near_norm).max()))
        stop = np.zeros(size, dtype=bool)
        stop[cells] = True
        stop &= rest
        a_total[stop] += full[stop]
        node_values.pop(cube)
        return required

    report = run_stopping_tree(f, evaluate_node, periodic, on_children)
    for cube, (full, _, _) in node_values.items():
        cells = cube_cells(cube)
        a_total[cells] += full[cells]

    t1t2f = _composition(first, second, f.values)
    return CompositionDomination(report, f, t1t2f, a_total, b_total, c_total)


# --- maximal composition M T1T2 ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class MaximalCompositionDomination:
    report: DominationReport
    q: float
    sides: DominationSides

    @property
    def family(self):
        return self.report.family

    @property
    def D(self):
        return self.report.D


def dominate_maximal_composition(first, second, f, g, q, inner_family="dyadic", periodic=False):
    """
    Sparse domination of ∫ |g| M T1T2 f; the family depends on g.

    Thresholds at a node Q₀:
        M T1T2(f χ_{27Q₀})          against ‖f‖_{L(log L)²,27Q₀}
        𝓜**_{MT1T2,Q₀} f            against ‖f‖_{L(log L)²,27Q₀}
        𝓜*_{MT1T2,Q₀}(f, g)         against q'‖f‖_{L log L,27Q₀} ⟨|g|⟩_{q,Q₀}

    Parameters:
        first, second (KernelOperator): T1 and T2
        f, g (GridFunction): Inputs
        q (float): Exponent in (1, 2]
        inner_family (str): Family of every maximal operator M involved; dyadic
            by default, "all" gives the all-cubes M

    Returns:
        MaximalCompositionDomination

    Raises:
        InvalidParameterError: If q is outside (1, 2]
    """
    if not 1 < q <= 2:
        raise InvalidParameterError(f"q must lie in (1, 2], got {q}")
    _check_geometry(f, first, second)
    if not f.same_geometry(g):
        raise GeometryMismatchError("f and g live on different grids")
    q_prime = q / (q - 1.0)
    spec = _average_spec(inner_family)
    abs_g = np.abs(g.values)

    def evaluate_node(cube):
        cells = cube_cells(cube)
        cells27 = cube_cells(dilate(cube, 27, periodic), periodic)
        local = f.values[cells27]
        big = luxemburg_values(local, 2)
        small = q_prime * luxemburg_values(local, 1) * float(power_values(abs_g[cells], q))
        full = maximal_values(_composition(first, second, _masked(f, cells27))[None, :], f.n, f.level, spec)[0]
        ratios = np.maximum.reduce([
            threshold_ratio(full[cells], big),
            threshold_ratio(local_double_star_M(first, second, f, cube, inner_family, periodic).values[cells], big),
            threshold_ratio(local_bisublinear(first, second, f, g, cube, inner_family, periodic).values[cells], small),
        ])
        return ratios, (big, small)

    report = run_stopping_tree(f, evaluate_node, periodic)
    mt1t2f = maximal_values(_composition(first, second, f.values)[None, :], f.n, f.level, spec)[0]
    lhs = float(np.dot(abs_g, mt1t2f)) * f.cell_measure
    rhs_core = sparse_form(
        report.dilated, f, g, LocalFunctional.luxemburg(2), LocalFunctional.average()
    ) + q_prime * sparse_form(report.dilated, f, g, LocalFunctional.luxemburg(1), LocalFunctional.power(q))
    sides = DominationSides(lhs, rhs_core, report.D, _ratio(lhs, report.D * rhs_core))
    return MaximalCompositionDomination(report, q, sides)


# --- single operator, pointwise ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class SingleDomination:
    """
    Attributes:
        report (DominationReport): Stopping tree and families
        k (int): Orlicz exponent of the maximal operator
        lhs (np.ndarray): M_{L(log L)^k} T f per cell
        sparse_sum (np.ndarray): Σ_Q ‖f‖_{L(log L)^{k+1},27Q} χ_{27Q} per cell
        constants (np.ndarray): lhs/sparse_sum per cell (0 where both vanish)
    """

    report: DominationReport
    k: int
    lhs: np.ndarray
    sparse_sum: np.ndarray
    constants: np.ndarray

    @property
    def family(self):
        return self.report.family

    @property
    def max_constant(self):
        return float(self.constants.max(initial=0.0))


def sparse_dominate_single(op, f, k, inner_family="dyadic", periodic=False):
    """
    Pointwise sparse bound M_{L(log L)^k} T f <= D Σ_Q ‖f‖_{L(log L)^{k+1},27Q} χ_{27Q}.

    The maximal operator runs over `inner_family` (dyadic unless told otherwise).

    Thresholds at a node Q₀:
        M_{L(log L)^k} T(f χ_{27Q₀})   against ‖f‖_{L(log L)^{k+1},27Q₀}
        local 𝓜*_{M_{L(log L)^k}T}    against the same norm

    Raises:
        InvalidParameterError: If k is not 0, 1 or 2
    """
    if k not in (0, 1, 2):
        raise InvalidParameterError(f"k must be 0, 1 or 2, got {k}")
    _check_geometry(f, op)
    functional = LocalFunctional.average() if k == 0 else LocalFunctional.luxemburg(k)
    spec = MaximalSpec(functional, inner_family)

    def evaluate_node(cube):
        cells = cube_cells(cube)
        cells27 = cube_cells(dilate(cube, 27, periodic), periodic)
        norm = luxemburg_values(f.values[cells27], k + 1)
        full = maximal_values(apply_values(op, _masked(f, cells27)[None, :]), f.n, f.level, spec)[0]
        ratios = np.maximum(
            threshold_ratio(full[cells], norm),
            threshold_ratio(local_star_k(op, f, cube, k, inner_family, periodic).values[cells], norm),
        )
        return ratios, (norm,)

    report = run_stopping_tree(f, evaluate_node, periodic)
    lhs = maximal_values(apply_values(op, f.values[None, :]), f.n, f.level, spec)[0]
    sparse_sum = np.zeros(f.values.size)
    for cube, node in zip(report.dilated.cubes, (item for item in report.nodes if not item.vanishing)):
        sparse_sum[cube_cells(cube, periodic)] += node.norms[0]
    constants = np.zeros_like(lhs)
    np.divide(lhs, sparse_sum, out=constants, where=sparse_sum > 0)
    constants[(sparse_sum == 0) & (lhs > 0)] = np.inf
    return SingleDomination(report, k, lhs, sparse_sum, constants)
