"""
Modulus service for the Semiannulus Regularity Toolkit.
Handles meshing of image regions and the discrete conformal modulus from
two conjugate Dirichlet problems with bilinear elements.
"""

import logging
import math
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg, spsolve

from app.models.field import Domain
from app.models.mesh import CurvedQuadMesh, ModulusEstimate
from app.models.semiannulus import SemiannulusSpec
from app.services.geometry import cayley, disk_automorphism, reflect_unit_circle, winding_number
from app.utils.errors import (
    DegenerateCell,
    NotSeparating,
    SolveFailure,
    UnsupportedSpec,
    ValidationError,
)
from config.config import get_settings

logger = logging.getLogger(__name__)

MapFn = Callable[[np.ndarray], np.ndarray]

# corner order (i, j), (i+1, j), (i+1, j+1), (i, j+1) in reference coordinates
_CORNER_XI = np.array([-1.0, 1.0, 1.0, -1.0])
_CORNER_ETA = np.array([-1.0, -1.0, 1.0, 1.0])
_GAUSS = np.array([-1.0, 1.0]) / math.sqrt(3.0)

MESH_HEADER = "# semiannulus-mesh v1"


def _gauss_points():
    """(xi, eta, dN/dxi, dN/deta) at the 2x2 Gauss points."""
    points = []
    for xi in _GAUSS:
        for eta in _GAUSS:
            d_xi = _CORNER_XI * (1.0 + _CORNER_ETA * eta) / 4.0
            d_eta = _CORNER_ETA * (1.0 + _CORNER_XI * xi) / 4.0
            points.append((xi, eta, d_xi, d_eta))
    return points


_GAUSS_POINTS = _gauss_points()

# finite-difference step of the chart derivative, relative to the cell size
CHART_STEP = 1e-4

# sides closer than this fraction of the mesh extent count as touching
SIDE_CONTACT_RTOL = 1e-12


def _node_index(n: int, m: int, periodic: bool) -> np.ndarray:
    """Global unknown index of node (i, j); periodic meshes identify row m with row 0."""
    if periodic:
        j = np.arange(m + 1) % m
        return np.arange(n + 1)[:, None] * m + j[None, :]
    return np.arange((n + 1) * (m + 1)).reshape(n + 1, m + 1)


def _cell_jacobians(mesh: CurvedQuadMesh) -> List[Tuple[np.ndarray, ...]]:
    """
    Jacobian entries (dx/dxi, dy/dxi, dx/deta, dy/deta) of every cell at each Gauss point.

    Curved meshes differentiate the chart by central differences; otherwise
    the cell is the bilinear quad through its four corner nodes.
    """
    nodes = mesh.nodes
    if not mesh.curved:
        corners = np.stack([nodes[:-1, :-1], nodes[1:, :-1], nodes[1:, 1:], nodes[:-1, 1:]], axis=-1)
        corners = corners.reshape(-1, 4)
        x, y = corners.real, corners.imag
        return [(x @ d_xi, y @ d_xi, x @ d_eta, y @ d_eta) for _, _, d_xi, d_eta in _GAUSS_POINTS]

    params = mesh.parameters
    origin = params[:-1, :-1].ravel()
    ds = (params[1:, :-1] - params[:-1, :-1]).real.ravel()
    dtheta = (params[:-1, 1:] - params[:-1, :-1]).imag.ravel()
    step = CHART_STEP * np.minimum(np.abs(ds), np.abs(dtheta))
    jacobians = []
    for xi, eta, _, _ in _GAUSS_POINTS:
        p = origin + 0.5 * (1.0 + xi) * ds + 0.5j * (1.0 + eta) * dtheta
        f_s = (mesh.chart(p + step) - mesh.chart(p - step)) / (2.0 * step)
        f_theta = (mesh.chart(p + 1j * step) - mesh.chart(p - 1j * step)) / (2.0 * step)
        jacobians.append((f_s.real * ds / 2, f_s.imag * ds / 2,
                          f_theta.real * dtheta / 2, f_theta.imag * dtheta / 2))
    return jacobians


def _element_matrices(mesh: CurvedQuadMesh) -> np.ndarray:
    """
    Bilinear stiffness matrices of all cells, shape (cells, 4, 4).

    Raises:
        DegenerateCell: If a cell has non-positive Jacobian at a Gauss point
    """
    shape = (mesh.n, mesh.m)
    stiffness = np.zeros((mesh.n * mesh.m, 4, 4))
    for (_, _, d_xi, d_eta), (dx_dxi, dy_dxi, dx_deta, dy_deta) in zip(_GAUSS_POINTS, _cell_jacobians(mesh)):
        det = dx_dxi * dy_deta - dy_dxi * dx_deta
        bad = np.flatnonzero(~(det > 0))
        if bad.size:
            cell = tuple(int(k) for k in np.unravel_index(bad[0], shape))
            raise DegenerateCell(f"cell {cell} folds or has non-positive area", cell=cell)
        grad_x = (dy_deta[:, None] * d_xi[None, :] - dy_dxi[:, None] * d_eta[None, :]) / det[:, None]
        grad_y = (dx_dxi[:, None] * d_eta[None, :] - dx_deta[:, None] * d_xi[None, :]) / det[:, None]
        stiffness += (np.einsum("ca,cb->cab", grad_x, grad_x)
                      + np.einsum("ca,cb->cab", grad_y, grad_y)) * det[:, None, None]
    return stiffness


def _assemble(stiffness: np.ndarray, index: np.ndarray) -> sparse.csr_matrix:
    """Sum element matrices into the global stiffness matrix."""
    connectivity = np.stack(
        [index[:-1, :-1], index[1:, :-1], index[1:, 1:], index[:-1, 1:]], axis=-1
    ).reshape(-1, 4)
    rows = np.broadcast_to(connectivity[:, :, None], stiffness.shape)
    cols = np.broadcast_to(connectivity[:, None, :], stiffness.shape)
    size = int(index.max()) + 1
    matrix = sparse.coo_matrix((stiffness.ravel(), (rows.ravel(), cols.ravel())), shape=(size, size))
    return matrix.tocsr()


def _dirichlet_energy(matrix: sparse.csr_matrix, zero: np.ndarray, one: np.ndarray) -> float:
    """
    Dirichlet energy of the discrete harmonic function with data 0 on zero, 1 on one.

    Conjugate gradients with a Jacobi preconditioner first; strongly
    anisotropic cells can stall it, in which case a sparse direct solve is used.

    Raises:
        SolveFailure: If neither solve gives a finite solution
    """
    settings = get_settings()
    size = matrix.shape[0]
    solution = np.zeros(size)
    solution[one] = 1.0
    fixed = np.zeros(size, dtype=bool)
    fixed[zero] = True
    fixed[one] = True
    free = np.flatnonzero(~fixed)
    if free.size:
        interior = matrix[free][:, free]
        rhs = -(matrix[free][:, np.flatnonzero(fixed)] @ solution[fixed])
        diagonal = interior.diagonal()
        if np.any(diagonal <= 0):
            raise SolveFailure("stiffness matrix has a non-positive diagonal entry")
        preconditioner = sparse.diags(1.0 / diagonal)
        values, info = cg(interior, rhs, rtol=settings.CG_RTOL, maxiter=settings.CG_MAXITER,
                          M=preconditioner)
        if info != 0:
            logger.info("cg stopped with info=%d on %d unknowns, using a direct solve", info, free.size)
            values = spsolve(interior.tocsc(), rhs)
        if not np.all(np.isfinite(values)):
            raise SolveFailure("linear solve produced non-finite potentials", context={"unknowns": free.size})
        solution[free] = values
    return float(solution @ (matrix @ solution))


def _angles(theta1: float, theta2: float, m: int, grading: str, inset: float) -> np.ndarray:
    lower, upper = theta1 + inset, theta2 - inset
    if grading == "uniform":
        return np.linspace(lower, upper, m + 1)
    if grading == "mercator":
        if lower <= 0 or upper >= math.pi:
            raise ValidationError("mercator grading needs a positive angular inset")
        tau = np.linspace(math.log(math.tan(lower / 2)), math.log(math.tan(upper / 2)), m + 1)
        return 2.0 * np.arctan(np.exp(tau))
    raise ValidationError(f"unknown grading '{grading}'")


class ModulusService:
    """
    Service class for conformal moduli.
    Provides canonical moduli, meshing of image regions, the discrete modulus
    and the ring and round-subannulus checks.
    """

    @staticmethod
    def canonical_modulus(spec: SemiannulusSpec) -> float:
        """
        Exact modulus log(R/r) of A(t;r,R) ∩ H, or log(r2/r1) of T(zeta;r1,r2).

        Raises:
            UnsupportedSpec: For sector-restricted specs
        """
        if spec.sector is not None:
            raise UnsupportedSpec("canonical_modulus is not defined for sector-restricted specs")
        return spec.log_ratio

    @staticmethod
    def mesh_region(map_fn: MapFn, spec: SemiannulusSpec, n: int, m: int,
                    grading: str = "uniform", inset: float = 0.0, label: str = "map") -> CurvedQuadMesh:
        """
        Mesh the image of a canonical semiannulus under a map.

        Nodes are images of the log-polar product grid: z = t + e^{s + i theta}
        for half-plane specs, z = M(e^{s + i theta}) for disk specs.

        Args:
            map_fn: Vectorised homeomorphism
            spec: Semiannulus to mesh
            n: Cells across (between the sides)
            m: Cells along (between the ends)
            grading: "uniform" or "mercator" spacing of theta
            inset: Angular inset keeping the ends off the boundary
            label: Name of the map, recorded in the provenance

        Returns:
            CurvedQuadMesh: Image mesh with the sides as columns

        Raises:
            ValidationError: If n or m is below 8
            DegenerateCell: If the image folds or leaves the finite plane
        """
        if n < 8 or m < 8:
            raise ValidationError(f"mesh needs n, m >= 8, got ({n}, {m})")
        theta1, theta2 = spec.theta_range
        s = np.linspace(math.log(spec.inner), math.log(spec.outer), n + 1)
        theta = _angles(theta1, theta2, m, grading, inset)
        parameters = s[:, None] + 1j * theta[None, :]
        anchor = None
        if spec.domain is Domain.UNIT_DISK:
            zeta = spec.zeta

            def chart(p):
                return np.asarray(map_fn(cayley(np.exp(p), zeta)), dtype=complex)

            anchor = complex(np.asarray(map_fn(cayley(np.array([0.5j * spec.inner]), zeta)))[0])
        else:
            center = spec.center

            def chart(p):
                return np.asarray(map_fn(center + np.exp(p)), dtype=complex)

        image = chart(parameters)
        if not np.all(np.isfinite(image)):
            i, j = np.argwhere(~np.isfinite(image))[0]
            raise DegenerateCell(f"map is not finite at node ({i}, {j})", cell=(int(i), int(j)))
        provenance = f"{label} on {spec.kind.value} inner={spec.inner:.6g} outer={spec.outer:.6g} grading={grading}"
        mesh = CurvedQuadMesh(nodes=image, provenance=provenance, domain=spec.domain,
                              interior_anchor=anchor, parameters=parameters, chart=chart)
        _element_matrices(mesh)
        return mesh

    @staticmethod
    def mesh_ring(map_fn: MapFn, r: float, R: float, n: int, m: int,
                  center: complex = 0.0, label: str = "map") -> CurvedQuadMesh:
        """
        Periodic mesh of the image of the round annulus A(center;r,R).

        Row m repeats row 0; the inner circle is side i = 0.
        """
        if not 0 < r < R:
            raise ValidationError(f"ring needs 0 < r < R, got ({r}, {R})")
        if n < 8 or m < 8:
            raise ValidationError(f"mesh needs n, m >= 8, got ({n}, {m})")
        s = np.linspace(math.log(r), math.log(R), n + 1)
        theta = 2.0 * math.pi * np.arange(m + 1) / m
        parameters = s[:, None] + 1j * theta[None, :]

        def chart(p):
            return np.asarray(map_fn(center + np.exp(p)), dtype=complex)

        image = chart(parameters)
        image[:, m] = image[:, 0]
        if not np.all(np.isfinite(image)):
            i, j = np.argwhere(~np.isfinite(image))[0]
            raise DegenerateCell(f"map is not finite at node ({i}, {j})", cell=(int(i), int(j)))
        return CurvedQuadMesh(nodes=image, periodic=True, angular_span=2.0 * math.pi,
                              provenance=f"{label} on ring r={r:.6g} R={R:.6g}",
                              parameters=parameters, chart=chart)

    @staticmethod
    def mesh_rectangle(a: float, n: int, m: int) -> CurvedQuadMesh:
        """Mesh of the rectangle [0, a] x [0, pi]; its modulus along the length is a."""
        if not a > 0:
            raise ValidationError(f"rectangle length must be positive, got {a}")
        x = np.linspace(0.0, a, n + 1)
        y = np.linspace(0.0, math.pi, m + 1)
        return CurvedQuadMesh(nodes=x[:, None] + 1j * y[None, :], provenance=f"rectangle a={a:.6g}")

    @staticmethod
    def discrete_modulus(mesh: CurvedQuadMesh) -> ModulusEstimate:
        """
        Discrete modulus from two Dirichlet problems.

        Sides at potentials 0 and 1 give E_sides and mod_primal = span / E_sides;
        ends at 0 and 1 give E_ends and mod_dual = span * E_ends. A periodic
        mesh identifies its ends in the first problem and is cut open along
        row 0 in the second.

        Sides that touch at mesh scale give the zero estimate without a solve.

        Raises:
            DegenerateCell: If a cell folds
            SolveFailure: If a linear solve fails
        """
        n, m = mesh.n, mesh.m
        extent = float(np.ptp(mesh.nodes.real) + np.ptp(mesh.nodes.imag))
        if mesh.side_distance() <= SIDE_CONTACT_RTOL * extent:
            logger.warning("sides of %s touch; modulus is 0", mesh.provenance or "mesh")
            return ModulusEstimate.collapsed(mesh.angular_span)
        stiffness = _element_matrices(mesh)

        side_index = _node_index(n, m, mesh.periodic)
        side_matrix = _assemble(stiffness, side_index)
        energy_sides = _dirichlet_energy(side_matrix, side_index[0, :], side_index[n, :])

        end_index = _node_index(n, m, False)
        end_matrix = side_matrix if not mesh.periodic else _assemble(stiffness, end_index)
        energy_ends = _dirichlet_energy(end_matrix, end_index[:, 0], end_index[:, m])

        if not (energy_sides > 0 and energy_ends > 0):
            raise SolveFailure(f"non-positive energy ({energy_sides}, {energy_ends})")
        estimate = ModulusEstimate.from_energies(energy_sides, energy_ends, mesh.angular_span)
        logger.debug("modulus %.8g (primal %.8g, dual %.8g) on %dx%d mesh",
                     estimate.value, estimate.mod_primal, estimate.mod_dual, n, m)
        return estimate

    @staticmethod
    def reflected_ring(mesh: CurvedQuadMesh) -> CurvedQuadMesh:
        """
        Double a disk semiannulus mesh across the unit circle into a ring mesh.

        The mesh is first moved by the disk automorphism sending its interior
        anchor to 0, so the reflected half stays bounded.
        """
        if mesh.periodic or mesh.domain is not Domain.UNIT_DISK:
            raise UnsupportedSpec("reflection needs a non-periodic unit-disk semiannulus mesh")
        anchor = mesh.interior_anchor if mesh.interior_anchor is not None else 0.0
        moved = disk_automorphism(mesh.nodes, anchor)
        mirrored = reflect_unit_circle(moved[:, -2::-1])
        nodes = np.concatenate([moved, mirrored], axis=1)
        nodes[:, -1] = nodes[:, 0]
        return CurvedQuadMesh(nodes=nodes, periodic=True, angular_span=2.0 * math.pi,
                              provenance=f"reflected({mesh.provenance})")

    @staticmethod
    def reflected_ring_modulus(source, n: int = 128, m: int = 128) -> ModulusEstimate:
        """
        Modulus of the doubled ring S ∪ reflection(S) of a disk semiannulus.

        Args:
            source: A disk SemiannulusSpec (meshed under the identity) or a disk CurvedQuadMesh
            n: Cells across when meshing a spec
            m: Cells along when meshing a spec

        Returns:
            ModulusEstimate: Ring modulus, equal to mod S
        """
        if isinstance(source, SemiannulusSpec):
            if source.domain is not Domain.UNIT_DISK:
                raise UnsupportedSpec("reflected_ring_modulus needs a disk semiannulus")
            source = ModulusService.mesh_region(lambda z: z, source, n, m, label="identity")
        return ModulusService.discrete_modulus(ModulusService.reflected_ring(source))

    @staticmethod
    def max_round_subannulus(ring: CurvedQuadMesh, z0: complex) -> Tuple[float, float]:
        """
        Largest round annulus A(z0;r,R) inside a ring mesh.

        r is the largest distance from z0 to the inner boundary polyline (side
        i = 0) and R the smallest distance from z0 to the outer polyline.

        Raises:
            NotSeparating: If the inner boundary does not wind around z0
        """
        if not ring.periodic:
            raise UnsupportedSpec("max_round_subannulus needs a ring mesh")
        inner = ring.side_a - z0
        outer = ring.side_b - z0
        winding = winding_number(ring.side_a, z0)
        if abs(winding) < 0.5:
            raise NotSeparating(f"ring does not separate {z0} from infinity")
        r = float(np.max(np.abs(inner)))
        start, end = outer[:-1], outer[1:]
        edge = end - start
        length_sq = np.abs(edge) ** 2
        safe = np.where(length_sq > 0, length_sq, 1.0)
        along = np.clip(-(np.conj(edge) * start).real / safe, 0.0, 1.0)
        R = float(np.min(np.abs(start + along * edge)))
        return r, R

    @staticmethod
    def write_mesh(mesh: CurvedQuadMesh, path) -> None:
        """Write a mesh as a flat text table "i j x y" with a header."""
        lines = [
            MESH_HEADER,
            f"# provenance: {mesh.provenance}",
            f"n {mesh.n} m {mesh.m} periodic {int(mesh.periodic)} span {mesh.angular_span!r}",
            f"sides i=0 i={mesh.n}",
            f"ends j=0 j={mesh.m}",
        ]
        if mesh.domain is not None:
            lines.append(f"domain {mesh.domain.value}")
        if mesh.interior_anchor is not None:
            lines.append(f"anchor {mesh.interior_anchor.real!r} {mesh.interior_anchor.imag!r}")
        lines.append("i j x y")
        for (i, j), z in np.ndenumerate(mesh.nodes):
            lines.append(f"{i} {j} {z.real!r} {z.imag!r}")
        Path(path).write_text("\n".join(lines) + "\n")

    @staticmethod
    def read_mesh(path) -> CurvedQuadMesh:
        """
        Read a mesh written by write_mesh.

        Raises:
            ValidationError: If the header or the node table is malformed
        """
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0].strip() != MESH_HEADER:
            raise ValidationError(f"{path}: not a mesh file")
        meta = {"provenance": "", "domain": None, "anchor": None}
        table_start = None
        for number, line in enumerate(lines[1:], start=1):
            parts = line.split()
            if line.startswith("# provenance:"):
                meta["provenance"] = line.split(":", 1)[1].strip()
            elif parts and parts[0] == "n":
                meta["n"], meta["m"] = int(parts[1]), int(parts[3])
                meta["periodic"], meta["span"] = bool(int(parts[5])), float(parts[7])
            elif parts and parts[0] == "domain":
                meta["domain"] = Domain(parts[1])
            elif parts and parts[0] == "anchor":
                meta["anchor"] = complex(float(parts[1]), float(parts[2]))
            elif parts == ["i", "j", "x", "y"]:
                table_start = number + 1
                break
        if table_start is None or "n" not in meta:
            raise ValidationError(f"{path}: missing size line or node table header")
        nodes = np.full((meta["n"] + 1, meta["m"] + 1), np.nan, dtype=complex)
        for line in lines[table_start:]:
            if not line.strip():
                continue
            i, j, x, y = line.split()
            nodes[int(i), int(j)] = complex(float(x), float(y))
        if not np.all(np.isfinite(nodes)):
            raise ValidationError(f"{path}: node table is incomplete")
        return CurvedQuadMesh(nodes=nodes, periodic=meta["periodic"], angular_span=meta["span"],
                              provenance=meta["provenance"], domain=meta["domain"],
                              interior_anchor=meta["anchor"])
