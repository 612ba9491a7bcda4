"""Two-qubit states, partial transpose, principal minors and negativity.

Basis order (0-based array index -> ket):
    0: |11>   1: |10>   2: |01>   3: |00>
The first label is qubit A, the second qubit B.  Docstrings use the
1-based labels |1>..|4> for the same four kets, so ``rho_14`` lives in
``elements[0, 3]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Sequence

import numpy as np

from .errors import InvalidState, NotHermitian, NotXState
from .linalg import cofactor_det, hermitian_2x2_eigvalsh, hermitian_eigvalsh, permanent_abs

TAU_HERM = 1e-10
TAU_TRACE = 1e-10
TAU_PSD = 1e-9
TAU_X = 1e-10

BASIS_LABEL = "11,10,01,00"

# 1-based index sets of the seven principal minors that can go negative
SEVEN_MINORS: tuple[tuple[int, ...], ...] = (
    (1, 4), (2, 3), (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4), (1, 2, 3, 4),
)
# relative slack for sign tests on sums of products
_ROUND_GUARD = 16 * np.finfo(float).eps
# entries outside the X pattern (0-based, upper triangle)
_NON_X = ((0, 1), (0, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class DensityMatrix:
    """Immutable 4x4 complex matrix in the |11>,|10>,|01>,|00> basis.

    Construction does not validate; call :func:`validate` for that.
    """

    elements: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.elements, dtype=complex)
        if arr.shape != (4, 4):
            raise InvalidState(f"expected a 4x4 matrix, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "elements", arr)

    def __getitem__(self, ij):
        return self.elements[ij]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.elements, other.elements))

    __hash__ = None  # type: ignore[assignment]

    @property
    def populations(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()

    def allclose(self, other: "DensityMatrix", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.elements, other.elements, rtol=0.0, atol=atol))

    @classmethod
    def from_pure(cls, psi: Sequence[complex]) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    def to_json(self) -> dict[str, Any]:
        return {
            "basis": BASIS_LABEL,
            "re": [[float(x) for x in row] for row in self.elements.real],
            "im": [[float(x) for x in row] for row in self.elements.imag],
        }


@dataclass(frozen=True)
class XState:
    """Seven-parameter X state: four populations, coherences c14 and c23."""

    p11: float
    p22: float
    p33: float
    p44: float
    c14: complex = 0j
    c23: complex = 0j

    def __post_init__(self) -> None:
        for name in ("p11", "p22", "p33", "p44"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "c14", complex(self.c14))
        object.__setattr__(self, "c23", complex(self.c23))

    def to_density(self) -> DensityMatrix:
        m = np.zeros((4, 4), dtype=complex)
        m[np.diag_indices(4)] = (self.p11, self.p22, self.p33, self.p44)
        m[0, 3], m[3, 0] = self.c14, self.c14.conjugate()
        m[1, 2], m[2, 1] = self.c23, self.c23.conjugate()
        return DensityMatrix(m)

    @property
    def minor14(self) -> float:
        """Minor {1,4} of the partial transpose: p11*p44 - |c23|^2."""
        return self.p11 * self.p44 - abs(self.c23) ** 2

    @property
    def minor23(self) -> float:
        """Minor {2,3} of the partial transpose: p22*p33 - |c14|^2."""
        return self.p22 * self.p33 - abs(self.c14) ** 2

    def is_entangled(self, tol: float = 0.0) -> bool:
        return self.minor14 < -tol or self.minor23 < -tol

    def separable_by_sign(self) -> bool:
        """PPT test on the two block minors, with slack only for rounding."""
        g14 = _ROUND_GUARD * (self.p11 * self.p44 + abs(self.c23) ** 2)
        g23 = _ROUND_GUARD * (self.p22 * self.p33 + abs(self.c14) ** 2)
        return self.minor14 >= -g14 and self.minor23 >= -g23

    def pt_min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the partial transpose from its two 2x2 blocks."""
        lo14, _ = hermitian_2x2_eigvalsh(self.p11, self.p44, self.c23)
        lo23, _ = hermitian_2x2_eigvalsh(self.p22, self.p33, self.c14)
        return min(lo14, lo23)

    def to_json(self) -> dict[str, Any]:
        return {
            "p11": self.p11, "p22": self.p22, "p33": self.p33, "p44": self.p44,
            "c14": [self.c14.real, self.c14.imag],
            "c23": [self.c23.real, self.c23.imag],
        }


@dataclass(frozen=True)
class MinorSet:
    m14: float
    m23: float
    m123: float
    m124: float
    m134: float
    m234: float
    m1234: float

    def as_dict(self) -> dict[str, float]:
        return {
            "14": self.m14, "23": self.m23, "123": self.m123, "124": self.m124,
            "134": self.m134, "234": self.m234, "1234": self.m1234,
        }

    @property
    def minimum(self) -> float:
        return min(self.as_dict().values())


@dataclass(frozen=True)
class Violation:
    name: str
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def summary(self) -> str:
        if self.valid:
            return "valid"
        return "invalid: " + ", ".join(f"{v.name} ({v.magnitude:.3g})" for v in self.violations)


def _as_array(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.elements
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 matrix, got shape {arr.shape}")
    return arr


def validate(rho: DensityMatrix | np.ndarray) -> ValidationReport:
    """Check Hermiticity, unit trace, nonnegative populations and PSD."""
    a = _as_array(rho)
    out: list[Violation] = []
    if not np.all(np.isfinite(a)):
        return ValidationReport((Violation("non-finite entries", math.inf),))
    herm = float(np.max(np.abs(a - a.conj().T)))
    if herm > TAU_HERM:
        out.append(Violation("non-Hermitian", herm))
    tr = abs(complex(np.trace(a)) - 1.0)
    if tr > TAU_TRACE:
        out.append(Violation("trace != 1", tr))
    pops = a.diagonal().real
    if pops.min() < -TAU_PSD:
        out.append(Violation("negative population", float(-pops.min())))
    lam_min = float(hermitian_eigvalsh(0.5 * (a + a.conj().T))[0])
    if lam_min < -TAU_PSD:
        out.append(Violation("not positive semidefinite", -lam_min))
    return ValidationReport(tuple(out))


def _check_hermitian(a: np.ndarray) -> None:
    herm = float(np.max(np.abs(a - a.conj().T)))
    if herm > TAU_HERM:
        raise NotHermitian(f"matrix is not Hermitian (residual {herm:.3g})")


def partial_transpose_array(a: np.ndarray) -> np.ndarray:
    # (a b; a' b') -> (a b'; a' b), i.e. transpose on qubit B
    t = np.asarray(a).reshape(2, 2, 2, 2)
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def partial_transpose(rho: DensityMatrix | np.ndarray) -> DensityMatrix:
    """Transpose with respect to qubit B.

    For an X state this moves c23 into position (1,4) and c14 into (2,3).
    """
    a = _as_array(rho)
    _check_hermitian(a)
    return DensityMatrix(partial_transpose_array(a))


def principal_minor(matrix: DensityMatrix | np.ndarray, indices: Sequence[int]) -> float:
    """Determinant of the submatrix on the given 1-based rows/columns."""
    a = _as_array(matrix)
    idx = list(indices)
    if not idx:
        raise ValueError("index set must be nonempty")
    if any(i < 1 or i > 4 for i in idx):
        raise ValueError(f"indices must lie in 1..4, got {idx}")
    if any(j <= i for i, j in zip(idx, idx[1:])):
        raise ValueError(f"indices must be strictly increasing, got {idx}")
    sub = a[np.ix_([i - 1 for i in idx], [i - 1 for i in idx])]
    det = complex(cofactor_det(sub))
    if abs(det.imag) > TAU_HERM * max(1.0, abs(det.real)):
        raise ValueError(f"minor has imaginary part {det.imag:.3g}; input not Hermitian?")
    return det.real


def minor_set(pt: DensityMatrix | np.ndarray) -> MinorSet:
    """The seven principal minors of an already partially transposed matrix."""
    a = _as_array(pt)
    return MinorSet(*(principal_minor(a, idx) for idx in SEVEN_MINORS))


def min_seven_minors(rho: DensityMatrix | np.ndarray) -> tuple[float, MinorSet]:
    """Return (P, minors) where P < 0 iff the state is entangled."""
    ms = minor_set(partial_transpose(rho))
    return ms.minimum, ms


def pt_eigenvalues(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    return hermitian_eigvalsh(partial_transpose(rho).elements)


def pt_min_eigenvalue(rho: DensityMatrix | np.ndarray) -> float:
    """Smallest partial-transpose eigenvalue; exact block solve for X states."""
    a = _as_array(rho)
    if _max_non_x(a) == 0.0:
        return _x_from_array(a).pt_min_eigenvalue()
    return float(pt_eigenvalues(a)[0])


def negativity(rho: DensityMatrix | np.ndarray) -> float:
    """Sum of |negative eigenvalues| of the partial transpose.

    For two qubits there is at most one, so this is max(0, -lambda_min).
    """
    return max(0.0, -pt_min_eigenvalue(rho))


def separable_by_sign(rho: DensityMatrix | np.ndarray) -> bool:
    """True iff det(rho^PT) >= 0 up to rounding.

    For two qubits the partial transpose of an entangled state has exactly one
    negative eigenvalue and full rank, so the determinant sign decides
    entanglement without an absolute threshold on the negativity.
    """
    a = _as_array(rho)
    if _max_non_x(a) == 0.0:
        return _x_from_array(a).separable_by_sign()
    pt = partial_transpose_array(a)
    det = complex(cofactor_det(pt)).real
    return det >= -_ROUND_GUARD * permanent_abs(pt)


def _max_non_x(a: np.ndarray) -> float:
    return max(max(abs(a[i, j]), abs(a[j, i])) for i, j in _NON_X)


def _x_from_array(a: np.ndarray) -> XState:
    d = a.diagonal().real
    return XState(d[0], d[1], d[2], d[3], a[0, 3], a[1, 2])


def is_x_state(rho: DensityMatrix | np.ndarray, tol: float = TAU_X) -> bool:
    return _max_non_x(_as_array(rho)) <= tol


def as_x_state(rho: DensityMatrix | np.ndarray, tol: float = TAU_X) -> XState:
    a = _as_array(rho)
    worst = _max_non_x(a)
    if worst > tol:
        raise NotXState(f"element outside the X pattern has magnitude {worst:.3g}")
    return _x_from_array(a)


# -- presets ---------------------------------------------------------------

def bell_psi_plus() -> DensityMatrix:
    """(|01> + |10>)/sqrt(2)."""
    return XState(0, 0.5, 0.5, 0, 0, 0.5).to_density()


def bell_phi_plus() -> DensityMatrix:
    """(|00> + |11>)/sqrt(2)."""
    return XState(0.5, 0, 0, 0.5, 0.5, 0).to_density()


def werner_singlet(a: float) -> XState:
    """a |Psi-><Psi-| + (1-a) I/4."""
    return XState((1 - a) / 4, (1 + a) / 4, (1 + a) / 4, (1 - a) / 4, 0, -a / 2)


def werner_triplet(a: float) -> XState:
    """a |Phi+><Phi+| + (1-a) I/4."""
    return XState((1 + a) / 4, (1 - a) / 4, (1 - a) / 4, (1 + a) / 4, a / 2, 0)


def eq18_state(sign: int = +1) -> XState:
    """(|11><11| + 2|Psi><Psi|)/3 with Psi = (|01> +/- |10>)/sqrt(2)."""
    return XState(1 / 3, 1 / 3, 1 / 3, 0, 0, sign / 3)


def maximally_mixed() -> DensityMatrix:
    return DensityMatrix(np.eye(4) / 4)


# -- serialization ---------------------------------------------------------

def _complex_pair(v: Any, name: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InvalidState(f"field {name!r} must be a number or [re, im]")


def state_from_json(obj: dict[str, Any] | str) -> DensityMatrix:
    """Parse a full ``{basis, re, im}`` state or the compact X-state form."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise InvalidState(
                f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(obj, dict):
        raise InvalidState("state JSON must be an object")
    if "re" in obj:
        basis = obj.get("basis", BASIS_LABEL)
        if basis != BASIS_LABEL:
            raise InvalidState(f"unsupported basis {basis!r}; expected {BASIS_LABEL!r}")
        try:
            re = np.array(obj["re"], dtype=float)
            im = np.array(obj.get("im", np.zeros((4, 4))), dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidState(f"fields 're'/'im' must be numeric 4x4 arrays: {exc}") from exc
        if re.shape != (4, 4) or im.shape != (4, 4):
            raise InvalidState(f"fields 're'/'im' must be 4x4, got {re.shape} and {im.shape}")
        return DensityMatrix(re + 1j * im)
    missing = [k for k in ("p11", "p22", "p33", "p44") if k not in obj]
    if missing:
        raise InvalidState(f"compact X-state is missing field(s) {missing}")
    try:
        x = XState(
            float(obj["p11"]), float(obj["p22"]), float(obj["p33"]), float(obj["p44"]),
            _complex_pair(obj.get("c14", 0.0), "c14"),
            _complex_pair(obj.get("c23", 0.0), "c23"),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidState(f"compact X-state has a non-numeric field: {exc}") from exc
    return x.to_density()


def state_to_json(rho: DensityMatrix | XState) -> str:
    # repr of a Python float is shortest-roundtrip, so parsing back is exact
    return json.dumps(rho.to_json())


def random_density(rng: np.random.Generator, rank: int = 4) -> DensityMatrix:
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_x_state(rng: np.random.Generator, entangled: bool | None = None) -> XState:
    """Random X state; with ``entangled`` set, resample until it matches."""
    while True:
        p = rng.dirichlet(np.ones(4))
        # coherence magnitudes are capped by the positivity conditions
        r14 = math.sqrt(p[0] * p[3]) * rng.uniform()
        r23 = math.sqrt(p[1] * p[2]) * rng.uniform()
        ph = rng.uniform(0, 2 * math.pi, size=2)
        x = XState(p[0], p[1], p[2], p[3], r14 * np.exp(1j * ph[0]), r23 * np.exp(1j * ph[1]))
        if entangled is None or x.is_entangled(TAU_PSD) == entangled:
            return x


def all_principal_index_sets() -> list[tuple[int, ...]]:
    return [c for k in range(1, 5) for c in combinations(range(1, 5), k)]
