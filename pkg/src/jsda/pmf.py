"""Exact finite-support probability objects and the risk/entropy functionals.

Everything here is double precision and deliberately boring: probability
vectors that must sum to one within 1e-12, joint grids over X x Y, and loss
tables with a recorded range. All types are frozen dataclasses whose arrays
are locked read-only, so instances can be shared freely across threads; every
operation is a pure function.

Conventions used throughout the package:

- zero-mass atoms are legal and kept in supports (union-support divergence
  computation needs them), but they never produce a conditional distribution;
- 0 * log 0 = 0 everywhere;
- accumulation uses ``math.fsum`` so that pinned analytic values (e.g. exact
  disjoint-support divergences) come out bit-clean.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence

import numpy as np

VALIDITY_TOL = 1e-12

Axis = Literal["y|x", "x|y"]
LogBase = Literal["e", "2"]


class DistributionError(ValueError):
    """A probability object violates its contract."""


def _log_with_base(base: LogBase | float) -> float:
    """Return the divisor converting natural logs to the requested base."""
    if base in ("e", math.e):
        return 1.0
    if base in ("2", 2, 2.0):
        return math.log(2.0)
    raise DistributionError(f"unsupported log base {base!r}; use 'e' or '2'")


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over an ordered finite support.

    ``atoms`` are unique hashable identifiers; ``coords`` optionally attaches
    a real coordinate to each atom (required by the 1-D threshold-classifier
    divergence, ignored elsewhere).
    """

    atoms: tuple
    probs: np.ndarray
    coords: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "probs", _freeze(self.probs))
        if self.probs.ndim != 1 or len(self.atoms) != self.probs.shape[0]:
            raise DistributionError("atoms and probs must be 1-D and aligned")
        if len(set(self.atoms)) != len(self.atoms):
            raise DistributionError("support atoms must be unique")
        if np.any(self.probs < 0):
            raise DistributionError("negative probability mass")
        total = math.fsum(self.probs.tolist())
        if abs(total - 1.0) > VALIDITY_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        if self.coords is not None:
            coords = tuple(float(c) for c in self.coords)
            if len(coords) != len(self.atoms):
                raise DistributionError("coords must align with atoms")
            object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.atoms)

    def prob(self, atom) -> float:
        """Mass of one atom (0.0 for atoms outside the support)."""
        try:
            return float(self.probs[self.atoms.index(atom)])
        except ValueError:
            return 0.0

    @staticmethod
    def uniform(atoms: Sequence, coords: Sequence[float] | None = None) -> "Pmf":
        n = len(atoms)
        if n == 0:
            raise DistributionError("empty support")
        return Pmf(tuple(atoms), np.full(n, 1.0 / n),
                   None if coords is None else tuple(coords))

    @staticmethod
    def from_mapping(mass: Mapping, coords: Mapping | None = None) -> "Pmf":
        atoms = tuple(mass.keys())
        probs = np.array([mass[a] for a in atoms], dtype=float)
        c = None if coords is None else tuple(float(coords[a]) for a in atoms)
        return Pmf(atoms, probs, c)

    def to_json_dict(self) -> dict:
        d: dict = {"support": list(self.atoms), "probs": self.probs.tolist()}
        if self.coords is not None:
            d["coords"] = list(self.coords)
        return d


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution over X x Y stored as a |X| x |Y| mass grid."""

    x_atoms: tuple
    y_atoms: tuple
    mass: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_atoms", tuple(self.x_atoms))
        object.__setattr__(self, "y_atoms", tuple(self.y_atoms))
        object.__setattr__(self, "mass", _freeze(self.mass))
        nx, ny = len(self.x_atoms), len(self.y_atoms)
        if ny < 2:
            raise DistributionError("a joint needs at least two labels")
        if self.mass.shape != (nx, ny):
            raise DistributionError(
                f"mass grid {self.mass.shape} does not match supports ({nx},{ny})")
        if len(set(self.x_atoms)) != nx or len(set(self.y_atoms)) != ny:
            raise DistributionError("support atoms must be unique")
        if np.any(self.mass < 0):
            raise DistributionError("negative joint mass")
        total = math.fsum(self.mass.ravel().tolist())
        if abs(total - 1.0) > VALIDITY_TOL:
            raise DistributionError(f"joint mass sums to {total!r}, not 1")

    @property
    def shape(self) -> tuple[int, int]:
        return self.mass.shape

    def flatten(self) -> Pmf:
        """View the joint as a Pmf over (x, y) pair atoms."""
        atoms = tuple((x, y) for x in self.x_atoms for y in self.y_atoms)
        return Pmf(atoms, self.mass.ravel())

    def to_json_dict(self) -> dict:
        return {
            "x_support": [list(a) if isinstance(a, tuple) else a for a in self.x_atoms],
            "y_support": [list(a) if isinstance(a, tuple) else a for a in self.y_atoms],
            "mass": self.mass.tolist(),
        }

    @staticmethod
    def from_json_dict(d: Mapping) -> "JointPmf":
        xs = tuple(tuple(a) if isinstance(a, list) else a for a in d["x_support"])
        ys = tuple(tuple(a) if isinstance(a, list) else a for a in d["y_support"])
        return JointPmf(xs, ys, np.asarray(d["mass"], dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json(s: str) -> "JointPmf":
        return JointPmf.from_json_dict(json.loads(s))


@dataclass(frozen=True)
class LossTable:
    """Per-(x, y) loss values with their recorded range.

    ``range_g`` is always max(values) - min(values); zero-one tables are
    detected exactly (every entry in {0, 1}).
    """

    values: np.ndarray
    range_g: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.ndim != 2:
            raise DistributionError("loss values must form an |X| x |Y| grid")
        if not np.all(np.isfinite(self.values)):
            raise DistributionError("loss values must be finite")
        g = float(self.values.max() - self.values.min())
        object.__setattr__(self, "range_g", g)

    @property
    def is_zero_one(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))


def marginals(j: JointPmf) -> tuple[Pmf, Pmf]:
    """Row/column sums of the joint grid as (Pmf over X, Pmf over Y)."""
    px = j.mass.sum(axis=1)
    py = j.mass.sum(axis=0)
    # Tiny accumulation drift is absorbed so downstream validity holds.
    return (Pmf(j.x_atoms, px / math.fsum(px.tolist())),
            Pmf(j.y_atoms, py / math.fsum(py.tolist())))


def conditionals(j: JointPmf, axis: Axis) -> dict:
    """Family of conditional Pmfs indexed by the conditioning atom.

    ``axis="y|x"`` conditions on X (one Pmf over Y per x atom with positive
    marginal mass); ``axis="x|y"`` conditions on Y. Zero-mass conditioning
    atoms yield no conditional. The reconstruction identity
    joint = conditional x marginal holds within 1e-12 by construction.
    """
    if axis == "y|x":
        weights = j.mass.sum(axis=1)
        rows = j.mass
        atoms, support = j.x_atoms, j.y_atoms
    elif axis == "x|y":
        weights = j.mass.sum(axis=0)
        rows = j.mass.T
        atoms, support = j.y_atoms, j.x_atoms
    else:
        raise DistributionError(f"unknown conditioning axis {axis!r}")
    family = {}
    for atom, w, row in zip(atoms, weights, rows):
        if w > 0:
            family[atom] = Pmf(support, row / w)
    if not family:
        raise DistributionError("empty conditional family")
    return family


def expected_risk(j: JointPmf, l: LossTable) -> float:
    """Expected loss sum(mass(x, y) * values(x, y)) over the grid."""
    if l.values.shape != j.shape:
        raise DistributionError(
            f"loss grid {l.values.shape} does not match joint {j.shape}")
    return math.fsum((j.mass * l.values).ravel().tolist())


def entropy(p: Pmf | np.ndarray, base: LogBase = "e") -> float:
    """Shannon entropy with the 0*log0 = 0 convention."""
    probs = p.probs if isinstance(p, Pmf) else np.asarray(p, dtype=float)
    h = math.fsum(-v * math.log(v) for v in probs.tolist() if v > 0.0)
    return h / _log_with_base(base)


def entropy_stats(j: JointPmf, base: LogBase = "e") -> tuple[float, float]:
    """(H(Y), H(Y|X)) of the joint, in the requested base.

    H(Y|X) is the marginal-weighted average of the per-x conditional
    entropies; the chain H(Y|X) <= H(Y) <= log|Y| always holds.
    """
    _, py = marginals(j)
    h_y = entropy(py, base)
    weights = j.mass.sum(axis=1)
    terms = []
    for w, row in zip(weights, j.mass):
        if w > 0:
            terms.append(w * math.fsum(-v / w * math.log(v / w)
                                       for v in row.tolist() if v > 0.0))
    h_y_given_x = math.fsum(terms) / _log_with_base(base)
    return h_y, h_y_given_x


def mixture(p: Pmf | JointPmf, q: Pmf | JointPmf, weight: float = 0.5):
    """Pointwise mixture weight*p + (1-weight)*q on the unioned support.

    Pmf supports are unioned with zero fill (atoms keep p's order, then q's
    new atoms); coordinates, when present on both, must agree on shared
    atoms. Joints must share both supports exactly.
    """
    if not 0.0 <= weight <= 1.0:
        raise DistributionError("mixture weight must lie in [0, 1]")
    if isinstance(p, JointPmf) and isinstance(q, JointPmf):
        if p.x_atoms != q.x_atoms or p.y_atoms != q.y_atoms:
            raise DistributionError("joint mixture requires identical supports")
        return JointPmf(p.x_atoms, p.y_atoms,
                        weight * p.mass + (1.0 - weight) * q.mass)
    if isinstance(p, Pmf) and isinstance(q, Pmf):
        pa, qa = align_supports(p, q)
        probs = weight * pa.probs + (1.0 - weight) * qa.probs
        return Pmf(pa.atoms, probs, pa.coords)
    raise DistributionError("mixture requires two Pmfs or two JointPmfs")


def align_supports(p: Pmf, q: Pmf) -> tuple[Pmf, Pmf]:
    """Re-express two Pmfs on their unioned support (zero-filled).

    Atom order is p's support followed by q's atoms not in p. Coordinates
    survive when available; conflicting coordinates on a shared atom are an
    error.
    """
    extra = [a for a in q.atoms if a not in set(p.atoms)]
    atoms = p.atoms + tuple(extra)
    index_q = {a: i for i, a in enumerate(q.atoms)}
    pp = np.zeros(len(atoms))
    qq = np.zeros(len(atoms))
    pp[: len(p.atoms)] = p.probs
    for i, a in enumerate(atoms):
        if a in index_q:
            qq[i] = q.probs[index_q[a]]
    coords = None
    if p.coords is not None and q.coords is not None:
        cp = dict(zip(p.atoms, p.coords))
        cq = dict(zip(q.atoms, q.coords))
        for a in cp:
            if a in cq and cp[a] != cq[a]:
                raise DistributionError(
                    f"incompatible atom coordinates for {a!r}: {cp[a]} vs {cq[a]}")
        merged = {**cq, **cp}
        coords = tuple(merged[a] for a in atoms)
    return (Pmf(atoms, pp, coords), Pmf(atoms, qq, coords))
