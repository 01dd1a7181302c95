"""Dense Hermitian linear algebra: matrix functions, projections, sampling, I/O.

Operators are small (dimension capped at 64) dense complex matrices wrapped
in :class:`HermitianOperator`, which symmetrizes on construction to absorb
roundoff.  All functions are pure; sampling takes an explicit seed or
``numpy.random.Generator`` and never touches global state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_DIM",
    "HermitianOperator",
    "OperatorPair",
    "SpectralDecomposition",
    "Channel",
    "as_operator",
    "identity",
    "diagonal",
    "eigh",
    "matrix_function",
    "positive_part_projection",
    "relative_sup",
    "sample_density",
    "haar_unitary",
    "sample_channel",
    "operator_to_dict",
    "operator_from_dict",
    "save_operator",
    "load_operator",
    "save_pair",
    "load_pair",
]

#: Largest supported matrix dimension; the toolkit certifies inequalities at
#: desk scale rather than doing HPC.
MAX_DIM = 64

#: An operator counts as strictly positive when min eig >= ratio * max eig.
POSITIVITY_RATIO = 1e-10


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A verified Hermitian matrix.

    Construction symmetrizes ``(A + A^dag)/2`` and rejects inputs that are
    non-square, non-finite, grossly non-Hermitian, or larger than
    :data:`MAX_DIM`.
    """

    mat: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.mat, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        d = m.shape[0]
        if not 1 <= d <= MAX_DIM:
            raise ValueError(f"dimension {d} outside [1, {MAX_DIM}]")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValueError("matrix entries must be finite")
        asym = np.linalg.norm(m - m.conj().T)
        if asym > 1e-6 * max(1.0, np.linalg.norm(m)):
            raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.mat + as_operator(other).mat)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.mat - as_operator(other).mat)

    def __mul__(self, scale: float) -> "HermitianOperator":
        return HermitianOperator(self.mat * float(scale))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


def as_operator(a) -> HermitianOperator:
    """Coerce an array-like into a :class:`HermitianOperator`."""
    return a if isinstance(a, HermitianOperator) else HermitianOperator(a)


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator(np.eye(dim, dtype=np.complex128))


def diagonal(values) -> HermitianOperator:
    """Diagonal operator from a real vector."""
    v = np.asarray(values, dtype=float)
    return HermitianOperator(np.diag(v.astype(np.complex128)))


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """A pair ``(rho, sigma)`` with ``sigma`` strictly positive.

    By default ``rho`` must be strictly positive as well
    (``min eig >= 1e-10 * max eig``); pass ``strict=False`` to admit a
    positive-semidefinite ``rho`` (used by the rank-deficient witness
    family, whose divergences live on the common support).  ``normalized``
    is auto-detected from the traces when not given.
    """

    rho: HermitianOperator
    sigma: HermitianOperator
    normalized: bool | None = None
    strict: bool = True

    def __post_init__(self) -> None:
        rho = as_operator(self.rho)
        sigma = as_operator(self.sigma)
        if rho.dim != sigma.dim:
            raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
        for name, op, strict in (("rho", rho, self.strict), ("sigma", sigma, True)):
            w = np.linalg.eigvalsh(op.mat)
            top = w[-1]
            if top <= 0.0:
                raise ValueError(f"{name} is not positive (max eig {top:.3e})")
            floor = POSITIVITY_RATIO * top if strict else -POSITIVITY_RATIO * top
            if w[0] < floor:
                kind = "strictly positive" if strict else "positive semidefinite"
                raise ValueError(
                    f"{name} is not {kind}: min eig {w[0]:.3e}, max eig {top:.3e}"
                )
        normalized = self.normalized
        if normalized is None:
            normalized = abs(rho.trace - 1.0) <= 1e-12 and abs(sigma.trace - 1.0) <= 1e-12
        elif normalized:
            for name, op in (("rho", rho), ("sigma", sigma)):
                if abs(op.trace - 1.0) > 1e-12:
                    raise ValueError(f"{name} trace {op.trace!r} != 1 but normalized=True")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "normalized", bool(normalized))

    @property
    def dim(self) -> int:
        return self.rho.dim


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and a unitary of eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(a) -> SpectralDecomposition:
    """Eigendecomposition with reconstruction and unitarity checks."""
    op = as_operator(a)
    try:
        w, v = np.linalg.eigh(op.mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        norm = np.linalg.norm(op.mat)
        raise np.linalg.LinAlgError(
            f"eigh failed to converge (dim={op.dim}, frobenius={norm:.3e}): {exc}"
        ) from exc
    scale = np.linalg.norm(op.mat)
    recon_err = np.linalg.norm((v * w) @ v.conj().T - op.mat)
    if recon_err > 1e-10 * max(scale, 1e-300):
        raise ArithmeticError(f"eigh reconstruction error {recon_err:.3e} at scale {scale:.3e}")
    unit_err = np.linalg.norm(v.conj().T @ v - np.eye(op.dim))
    if unit_err > 1e-10:
        raise ArithmeticError(f"eigenvector unitarity defect {unit_err:.3e}")
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def matrix_function(a, f) -> HermitianOperator:
    """Apply a real scalar function to a Hermitian operator via its spectrum.

    ``f`` must be finite on the spectrum (e.g. ``np.log`` needs strictly
    positive eigenvalues); violations raise ``ValueError``.
    """
    dec = eigh(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(dec.eigenvalues), dtype=float)
    if fw.shape != dec.eigenvalues.shape or not np.all(np.isfinite(fw)):
        raise ValueError(
            "function is undefined on part of the spectrum "
            f"(eigenvalue range [{dec.eigenvalues[0]:.3e}, {dec.eigenvalues[-1]:.3e}])"
        )
    v = dec.eigenvectors
    return HermitianOperator((v * fw) @ v.conj().T)


def positive_part_projection(a) -> HermitianOperator:
    """Orthogonal projector onto the strictly positive eigenspace.

    Eigenvalues within ``tau = 1e-12 * max(1, |a|_inf)`` of zero are
    excluded, matching a strict ``> 0`` comparison up to roundoff.
    """
    op = as_operator(a)
    w, v = np.linalg.eigh(op.mat)
    tau = 1e-12 * max(1.0, float(np.abs(w).max()) if w.size else 0.0)
    cols = v[:, w > tau]
    if cols.shape[1] == 0:
        return HermitianOperator(np.zeros_like(op.mat))
    return HermitianOperator(cols @ cols.conj().T)


def _whitened(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """``sigma^{-1/2} rho sigma^{-1/2}`` (symmetrized)."""
    w, v = np.linalg.eigh(sigma)
    if w[0] <= 0.0:
        raise ValueError(f"sigma is singular (min eig {w[0]:.3e})")
    b = (v * w**-0.5) @ v.conj().T
    t = b @ rho @ b
    return 0.5 * (t + t.conj().T)


def generalized_spectrum(pair: OperatorPair) -> np.ndarray:
    """Ascending eigenvalues of ``sigma^{-1/2} rho sigma^{-1/2}``.

    These are the generalized eigenvalues of ``(rho, sigma)``: the points
    where ``rho - r sigma`` changes inertia.
    """
    return np.linalg.eigvalsh(_whitened(pair.rho.mat, pair.sigma.mat))


def relative_sup(pair: OperatorPair) -> float:
    """Largest generalized eigenvalue ``R = |sigma^{-1/2} rho sigma^{-1/2}|_inf``."""
    return float(generalized_spectrum(pair)[-1])


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def sample_density(dim: int, rank: int | None = None, seed=0) -> HermitianOperator:
    """Unit-trace positive operator ``G G^dag / Tr`` from a Ginibre factor.

    ``G`` is ``dim x rank`` standard complex Gaussian.  Full-rank requests
    are regularized by mixing in ``1e-8`` of the maximally mixed state so
    the output passes the strict-positivity gate.  Deterministic per seed.
    """
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = _rng(seed)
    g = _complex_gaussian(rng, (dim, rank))
    a = g @ g.conj().T
    rho = a / np.trace(a).real
    if rank == dim:
        rho = (1.0 - 1e-8) * rho + 1e-8 * np.eye(dim) / dim
    return HermitianOperator(rho)


def haar_unitary(dim: int, seed=0) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a Ginibre matrix."""
    rng = _rng(seed)
    q, r = np.linalg.qr(_complex_gaussian(rng, (dim, dim)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True, eq=False)
class Channel:
    """Completely positive trace-preserving map ``X -> Tr_env[V X V^dag]``."""

    isometry: np.ndarray
    dim_in: int
    dim_out: int
    dim_env: int

    def apply_matrix(self, x: np.ndarray) -> np.ndarray:
        y = self.isometry @ x @ self.isometry.conj().T
        y4 = y.reshape(self.dim_out, self.dim_env, self.dim_out, self.dim_env)
        return np.einsum("aebe->ab", y4)

    def __call__(self, x):
        if isinstance(x, HermitianOperator):
            return HermitianOperator(self.apply_matrix(x.mat))
        return self.apply_matrix(np.asarray(x, dtype=np.complex128))


def sample_channel(dim_in: int, dim_env: int, seed=0, dim_out: int | None = None) -> Channel:
    """Haar-random channel from a Stinespring isometry into out x env.

    ``dim_env = 1`` yields a unitary channel; ``dim_out = 1`` traces the
    input out completely.  Requires ``dim_out * dim_env >= dim_in`` so an
    isometry exists.
    """
    dim_out = dim_in if dim_out is None else int(dim_out)
    if dim_in < 1 or dim_env < 1 or dim_out < 1:
        raise ValueError("dimensions must be >= 1")
    if dim_out * dim_env < dim_in:
        raise ValueError(
            f"no isometry from dim {dim_in} into {dim_out}x{dim_env}"
        )
    rng = _rng(seed)
    g = _complex_gaussian(rng, (dim_out * dim_env, dim_in))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    v = q * (d / np.abs(d))
    return Channel(v, dim_in, dim_out, dim_env)


# ---------------------------------------------------------------------------
# JSON matrix I/O
# ---------------------------------------------------------------------------


def operator_to_dict(op: HermitianOperator) -> dict:
    """JSON-ready ``{"dim": n, "re": [[...]], "im": [[...]]}`` encoding."""
    op = as_operator(op)
    return {
        "dim": op.dim,
        "re": op.mat.real.tolist(),
        "im": op.mat.imag.tolist(),
    }


def operator_from_dict(data: dict) -> HermitianOperator:
    try:
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed operator record: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(
            f"operator record shape mismatch: dim={dim}, re {re.shape}, im {im.shape}"
        )
    return HermitianOperator(re + 1j * im)


def save_operator(op: HermitianOperator, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(operator_to_dict(op), fh)


def load_operator(path) -> HermitianOperator:
    with open(path, "r", encoding="utf-8") as fh:
        return operator_from_dict(json.load(fh))


def save_pair(pair: OperatorPair, path) -> None:
    record = {"rho": operator_to_dict(pair.rho), "sigma": operator_to_dict(pair.sigma)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh)


def load_pair(path, strict: bool = True) -> OperatorPair:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "rho" not in data or "sigma" not in data:
        raise ValueError('pair file must contain "rho" and "sigma" records')
    return OperatorPair(
        operator_from_dict(data["rho"]), operator_from_dict(data["sigma"]), strict=strict
    )
