"""Words over finitely presented groups and unitary weight representations.

Supported presentations: free abelian Z^d, free groups F_r, the symmetric
group S3 on two transposition generators, and braid groups B_n (words only,
equality decided through representation values). Weights follow the reversed
composition convention: the weight of a concatenation w1.w2 is the matrix
product eval(w2) @ eval(w1), with words read left-to-right chronologically.

Checks return CheckReport objects; integer-entry representations are compared
exactly, floating ones at 1e-12.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    MalformedWordError,
    NotApplicableError,
    PresentationMismatchError,
)
from .reports import CheckReport

MATRIX_TOL = 1e-12

FREE_ABELIAN = "free_abelian"
FREE = "free"
SYMMETRIC_S3 = "symmetric_s3"
BRAID = "braid"

_KINDS = (FREE_ABELIAN, FREE, SYMMETRIC_S3, BRAID)


@dataclass(frozen=True)
class GroupPresentation:
    kind: str
    param: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise MalformedWordError(f"unknown presentation kind {self.kind!r}")
        if self.kind == SYMMETRIC_S3:
            if self.param != 2:
                raise MalformedWordError("S3 has exactly two transposition generators")
        elif self.kind == BRAID:
            if self.param < 2:
                raise MalformedWordError("braid groups need at least 2 strands")
        elif self.param < 1:
            raise MalformedWordError(f"{self.kind} needs a positive parameter")

    @property
    def n_generators(self) -> int:
        if self.kind == BRAID:
            return self.param - 1
        return self.param

    def generator_name(self, index: int) -> str:
        prefix = {FREE_ABELIAN: "e", FREE: "l", SYMMETRIC_S3: "t", BRAID: "b"}[self.kind]
        return f"{prefix}{index + 1}"


def free_abelian(d: int) -> GroupPresentation:
    return GroupPresentation(FREE_ABELIAN, d)


def free_group(rank: int) -> GroupPresentation:
    return GroupPresentation(FREE, rank)


def symmetric_s3() -> GroupPresentation:
    return GroupPresentation(SYMMETRIC_S3, 2)


def braid_group(strands: int) -> GroupPresentation:
    return GroupPresentation(BRAID, strands)


@dataclass(frozen=True)
class GroupWord:
    presentation: GroupPresentation
    letters: tuple  # ((generator index, +-1), ...)

    def __post_init__(self):
        n = self.presentation.n_generators
        for gen, sign in self.letters:
            if not (0 <= gen < n):
                raise MalformedWordError(f"generator index {gen} out of range 0..{n - 1}")
            if sign not in (1, -1):
                raise MalformedWordError(f"exponent sign must be +-1, got {sign}")

    def __str__(self):
        if not self.letters:
            return "e"
        parts = []
        for gen, sign in self.letters:
            name = self.presentation.generator_name(gen)
            parts.append(name if sign == 1 else name + "^-1")
        return ".".join(parts)


def word(presentation: GroupPresentation, letters) -> GroupWord:
    return GroupWord(presentation, tuple((int(g), int(s)) for g, s in letters))


def empty_word(presentation: GroupPresentation) -> GroupWord:
    return GroupWord(presentation, ())


# S3 bookkeeping: elements are permutations of (0,1,2); a word is applied
# chronologically, so perm(w . t) = t o perm(w).
_S3_T = ((1, 0, 2), (0, 2, 1))
_S3_IDENT = (0, 1, 2)


def _s3_apply(p, q):
    """Permutation of 'q then p' (chronological composition)."""
    return tuple(p[q[i]] for i in range(3))


def _s3_perm_of_letters(letters):
    perm = _S3_IDENT
    for gen, _sign in letters:  # transpositions are involutions; sign is moot
        perm = _s3_apply(_S3_T[gen], perm)
    return perm


_S3_CANONICAL = {
    _S3_IDENT: (),
    (1, 0, 2): ((0, 1),),
    (0, 2, 1): ((1, 1),),
    (2, 1, 0): ((0, 1), (1, 1), (0, 1)),  # the third transposition
    (2, 0, 1): ((0, 1), (1, 1)),
    (1, 2, 0): ((1, 1), (0, 1)),
}


def _free_reduce(letters):
    stack = []
    for gen, sign in letters:
        if stack and stack[-1][0] == gen and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((gen, sign))
    return tuple(stack)


def exponent_vector(w: GroupWord) -> np.ndarray:
    """Abelianized exponents; canonical data for free-abelian words."""
    vec = np.zeros(w.presentation.n_generators, dtype=np.int64)
    for gen, sign in w.letters:
        vec[gen] += sign
    return vec


def word_from_exponents(presentation: GroupPresentation, exponents) -> GroupWord:
    if presentation.kind != FREE_ABELIAN:
        raise MalformedWordError("exponent vectors only describe free-abelian words")
    letters = []
    for gen, e in enumerate(np.asarray(exponents, dtype=np.int64)):
        sign = 1 if e > 0 else -1
        letters.extend([(gen, sign)] * abs(int(e)))
    return GroupWord(presentation, tuple(letters))


def reduce_word(w: GroupWord) -> GroupWord:
    """Canonical normal form; idempotent, and w . w^-1 reduces to the empty word."""
    kind = w.presentation.kind
    if kind == FREE_ABELIAN:
        return word_from_exponents(w.presentation, exponent_vector(w))
    if kind == SYMMETRIC_S3:
        return GroupWord(w.presentation, _S3_CANONICAL[_s3_perm_of_letters(w.letters)])
    # free groups and braid words share free reduction; braid equality beyond
    # that is only decided through representation values
    return GroupWord(w.presentation, _free_reduce(w.letters))


def concat(w1: GroupWord, w2: GroupWord) -> GroupWord:
    """Reduced concatenation, w1 first chronologically."""
    if w1.presentation != w2.presentation:
        raise PresentationMismatchError(
            f"cannot concatenate words over {w1.presentation} and {w2.presentation}"
        )
    return reduce_word(GroupWord(w1.presentation, w1.letters + w2.letters))


def inverse_word(w: GroupWord) -> GroupWord:
    letters = tuple((gen, -sign) for gen, sign in reversed(w.letters))
    return reduce_word(GroupWord(w.presentation, letters))


def random_word(presentation: GroupPresentation, rng: np.random.Generator, max_len: int = 8) -> GroupWord:
    length = int(rng.integers(0, max_len + 1))
    n = presentation.n_generators
    letters = tuple(
        (int(rng.integers(0, n)), int(1 - 2 * rng.integers(0, 2))) for _ in range(length)
    )
    return reduce_word(GroupWord(presentation, letters))


# ---------------------------------------------------------------------------
# Unitary representations


@dataclass(frozen=True)
class UnitaryRep:
    """Generator images of a weight system over a presentation.

    Construction validates shapes only; unitarity and the group law are the
    business of the check_* operations (deliberately corrupted fixtures must
    be constructible).
    """

    presentation: GroupPresentation
    dimension: int
    images: tuple  # one matrix per generator

    def __post_init__(self):
        if len(self.images) != self.presentation.n_generators:
            raise MalformedWordError(
                f"expected {self.presentation.n_generators} generator images, got {len(self.images)}"
            )
        frozen = []
        for mat in self.images:
            arr = np.asarray(mat)
            if arr.shape != (self.dimension, self.dimension):
                raise MalformedWordError(
                    f"image shape {arr.shape} does not match dimension {self.dimension}"
                )
            arr = arr.copy()
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "images", tuple(frozen))

    @property
    def is_integer(self) -> bool:
        return all(np.issubdtype(m.dtype, np.integer) for m in self.images)

    def identity_matrix(self) -> np.ndarray:
        dtype = np.result_type(*(m.dtype for m in self.images))
        return np.eye(self.dimension, dtype=dtype)


def rep_eval(rep: UnitaryRep, w: GroupWord) -> np.ndarray:
    """Product of generator images in reversed word order; eval(empty) = I."""
    if rep.presentation != w.presentation:
        raise PresentationMismatchError("representation and word presentations differ")
    out = rep.identity_matrix()
    for gen, sign in reversed(w.letters):
        mat = rep.images[gen] if sign == 1 else rep.images[gen].conj().T
        out = out @ mat
    return out


def _tolerance_for(rep: UnitaryRep) -> float:
    return 0.0 if rep.is_integer else MATRIX_TOL


def _defect(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)))


def check_rep_homomorphism(rep: UnitaryRep, n_samples: int, seed: int) -> CheckReport:
    """Sampled reversed-product law: eval(w1.w2) == eval(w2) @ eval(w1)."""
    if n_samples < 1:
        raise NotApplicableError("need at least one sample")
    rng = np.random.default_rng(seed)
    tol = _tolerance_for(rep)
    worst = 0.0
    witnesses = []
    for _ in range(n_samples):
        w1 = random_word(rep.presentation, rng)
        w2 = random_word(rep.presentation, rng)
        d = _defect(rep_eval(rep, concat(w1, w2)), rep_eval(rep, w2) @ rep_eval(rep, w1))
        if d > worst:
            worst = d
        if d > tol and len(witnesses) < 3:
            witnesses.append(f"{w1} | {w2}")
    return CheckReport(
        name="rep_homomorphism",
        passed=worst <= tol,
        max_defect=worst,
        tolerance=tol,
        witnesses=tuple(witnesses),
        details={"n_samples": n_samples, "seed": seed},
    )


def check_rep_unitary(rep: UnitaryRep, n_samples: int = 100, seed: int = 0) -> CheckReport:
    """Generator images and random words satisfy M* M = I and eval(w^-1) = eval(w)*."""
    rng = np.random.default_rng(seed)
    tol = _tolerance_for(rep)
    eye = np.eye(rep.dimension)
    worst = 0.0
    witnesses = []

    def note(d, label):
        nonlocal worst
        if d > worst:
            worst = d
        if d > tol and len(witnesses) < 3:
            witnesses.append(label)

    for gen, mat in enumerate(rep.images):
        name = rep.presentation.generator_name(gen)
        note(_defect(np.asarray(mat).conj().T @ mat, eye), f"{name}* {name} != I")
    for _ in range(n_samples):
        w = random_word(rep.presentation, rng)
        m = rep_eval(rep, w)
        note(_defect(m.conj().T @ m, eye), f"({w})* ({w}) != I")
        note(_defect(rep_eval(rep, inverse_word(w)), m.conj().T), f"eval({w}^-1) != eval({w})*")
    return CheckReport(
        name="rep_unitary",
        passed=worst <= tol,
        max_defect=worst,
        tolerance=tol,
        witnesses=tuple(witnesses),
        details={"n_samples": n_samples, "seed": seed},
    )


def check_yang_baxter(rep: UnitaryRep) -> CheckReport:
    """Adjacent-generator braid relation b_i b_{i+1} b_i = b_{i+1} b_i b_{i+1}."""
    pres = rep.presentation
    if pres.kind != BRAID:
        raise NotApplicableError("the braid relation only applies to braid presentations")
    if pres.param < 3:
        raise NotApplicableError("need at least 3 strands for an adjacent generator pair")
    tol = _tolerance_for(rep)
    worst = 0.0
    witnesses = []
    for i in range(pres.n_generators - 1):
        lhs = word(pres, [(i, 1), (i + 1, 1), (i, 1)])
        rhs = word(pres, [(i + 1, 1), (i, 1), (i + 1, 1)])
        d = _defect(rep_eval(rep, lhs), rep_eval(rep, rhs))
        if d > worst:
            worst = d
        if d > tol and len(witnesses) < 3:
            witnesses.append(f"{lhs} != {rhs}")
    return CheckReport(
        name="yang_baxter",
        passed=worst <= tol,
        max_defect=worst,
        tolerance=tol,
        witnesses=tuple(witnesses),
        details={"strands": pres.param},
    )


# ---------------------------------------------------------------------------
# Stock representations

_E1 = np.array([[-1, 0, 0], [0, 0, -1], [0, -1, 0]], dtype=np.int64)
_E2 = np.array([[0, 0, -1], [0, -1, 0], [-1, 0, 0]], dtype=np.int64)


def s3_standard_rep() -> UnitaryRep:
    """Two pi-rotations generating the six-element rotation group of S3 weights."""
    return UnitaryRep(symmetric_s3(), 3, (_E1, _E2))


def f2_to_s3_rep() -> UnitaryRep:
    """Free two-generator weights factoring through the six S3 rotations."""
    return UnitaryRep(free_group(2), 3, (_E1, _E2))


def s3_element_matrices() -> dict:
    """The full six-matrix image set {I, E1, E2, E3, E+, E-}."""
    return {
        "I": np.eye(3, dtype=np.int64),
        "E1": _E1.copy(),
        "E2": _E2.copy(),
        "E3": _E1 @ _E2 @ _E1,
        "E+": _E1 @ _E2,
        "E-": _E2 @ _E1,
    }


def bloch_scalar_rep(theta) -> UnitaryRep:
    """Scalar weights n -> exp(-i theta . n) over Z^d; theta taken mod 2 pi."""
    th = np.atleast_1d(np.asarray(theta, dtype=float)) % (2 * np.pi)
    images = tuple(np.array([[np.exp(-1j * t)]]) for t in th)
    return UnitaryRep(free_abelian(len(th)), 1, images)


def braid_scalar_rep(strands: int, phases) -> UnitaryRep:
    """Scalar braid weights b_i -> exp(i alpha_i); a common alpha satisfies the braid relation."""
    pres = braid_group(strands)
    alphas = np.broadcast_to(np.asarray(phases, dtype=float), (pres.n_generators,))
    images = tuple(np.array([[np.exp(1j * a)]]) for a in alphas)
    return UnitaryRep(pres, 1, images)


# ---------------------------------------------------------------------------
# JSON serialization of representations

def rep_to_json(rep: UnitaryRep) -> str:
    images = []
    for mat in rep.images:
        arr = np.asarray(mat, dtype=complex).reshape(-1)
        images.append([[float(z.real), float(z.imag)] for z in arr])
    doc = {
        "presentation": {"kind": rep.presentation.kind, "param": rep.presentation.param},
        "dimension": rep.dimension,
        "images": images,
        "integer": rep.is_integer,
    }
    return json.dumps(doc, sort_keys=True)


def rep_from_json(text: str) -> UnitaryRep:
    doc = json.loads(text)
    pres = GroupPresentation(doc["presentation"]["kind"], int(doc["presentation"]["param"]))
    dim = int(doc["dimension"])
    images = []
    for flat in doc["images"]:
        arr = np.array([complex(re, im) for re, im in flat]).reshape(dim, dim)
        if doc.get("integer") and np.allclose(arr.imag, 0) and np.allclose(arr.real, np.round(arr.real)):
            arr = np.round(arr.real).astype(np.int64)
        images.append(arr)
    return UnitaryRep(pres, dim, tuple(images))
