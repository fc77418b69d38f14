"""Candidate-function dictionaries built from sampled states.

Column layout: optional constant, then homogeneous monomial blocks of degree
1..poly_order, then ``sin`` of the monomial blocks of degree 1..sin_order,
then ``cos`` of degree 1..cos_order. Inside a block monomials follow
``itertools.combinations_with_replacement`` order, i.e. graded lexicographic
with earlier state variables first: u1^2, u1*u2, u1*u3, u2^2, u2*u3, u3^2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

CONSTANT, MONOMIAL, SIN, COS = "constant", "monomial", "sin", "cos"


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class DictionarySpec:
    poly_order: int = 2
    sin_order: int = 0
    cos_order: int = 0
    include_constant: bool = True

    def __post_init__(self):
        for name in ("poly_order", "sin_order", "cos_order"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not (self.include_constant or self.poly_order or self.sin_order or self.cos_order):
            raise ValueError("dictionary would have no columns")

    def n_columns(self, d):
        def block(p):
            return sum(comb(d + k - 1, k) for k in range(1, p + 1))

        return int(self.include_constant) + block(self.poly_order) + block(self.sin_order) + block(self.cos_order)


@dataclass(frozen=True)
class TermLabel:
    kind: str
    exponents: tuple

    @property
    def degree(self):
        return sum(self.exponents)

    def monomial_str(self):
        parts = []
        for i, e in enumerate(self.exponents):
            if e == 1:
                parts.append(f"u{i + 1}")
            elif e > 1:
                parts.append(f"u{i + 1}^{e}")
        return "*".join(parts)

    def __str__(self):
        if self.kind == CONSTANT:
            return "1"
        mono = self.monomial_str()
        if self.kind == MONOMIAL:
            return mono
        return f"{self.kind}({mono})"

    def evaluate(self, states):
        """Evaluate on a ``(T, d)`` array (or a single ``d``-vector)."""
        states = np.asarray(states, dtype=float)
        if self.kind == CONSTANT:
            return np.ones(states.shape[:-1])
        val = np.prod(states ** np.asarray(self.exponents), axis=-1)
        if self.kind == SIN:
            return np.sin(val)
        if self.kind == COS:
            return np.cos(val)
        return val


def _exponents(d, combo):
    e = [0] * d
    for i in combo:
        e[i] += 1
    return tuple(e)


def monomial_columns(states, degree):
    """All degree-homogeneous monomials of the state columns.

    Returns ``(matrix, labels)`` with ``C(d + degree - 1, degree)`` columns.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    U = np.atleast_2d(np.asarray(states, dtype=float))
    T, d = U.shape
    combos = list(itertools.combinations_with_replacement(range(d), degree))
    M = np.empty((T, len(combos)))
    for j, combo in enumerate(combos):
        col = U[:, combo[0]].copy()
        for i in combo[1:]:
            col *= U[:, i]
        M[:, j] = col
    labels = [TermLabel(MONOMIAL, _exponents(d, c)) for c in combos]
    return M, labels


def assemble_dictionary(states, spec, check_rows=True):
    """Dictionary matrix and aligned labels for ``states`` of shape ``(T, d)``.

    Raises ``DimensionError`` when there are fewer samples than columns.
    """
    U = np.atleast_2d(np.asarray(states, dtype=float))
    T, d = U.shape
    n = spec.n_columns(d)
    if check_rows and T < n:
        raise DimensionError(
            f"dictionary has {n} columns but only {T} samples; "
            "use a longer time series or lower the dictionary orders"
        )
    blocks, labels = [], []
    if spec.include_constant:
        blocks.append(np.ones((T, 1)))
        labels.append(TermLabel(CONSTANT, (0,) * d))
    cache = {}

    def mono(k):
        if k not in cache:
            cache[k] = monomial_columns(U, k)
        return cache[k]

    for k in range(1, spec.poly_order + 1):
        M, lab = mono(k)
        blocks.append(M)
        labels.extend(lab)
    for kind, order, fn in ((SIN, spec.sin_order, np.sin), (COS, spec.cos_order, np.cos)):
        for k in range(1, order + 1):
            M, lab = mono(k)
            blocks.append(fn(M))
            labels.extend(TermLabel(kind, t.exponents) for t in lab)
    return np.hstack(blocks), labels


def evaluate_model(coeffs, labels, state):
    """Right-hand side ``f(state)`` of an identified model.

    ``coeffs`` has one column per equation (shape ``(n, d)``); a 1-D
    ``coeffs`` is treated as a single equation. ``state`` may be one state
    vector or a ``(T, d)`` array of them.
    """
    C = np.asarray(coeffs, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    if C.shape[0] != len(labels):
        raise ValueError(f"{C.shape[0]} coefficient rows for {len(labels)} labels")
    state = np.asarray(state, dtype=float)
    terms = np.stack([lab.evaluate(state) for lab in labels], axis=-1)
    return terms @ C


def label_index(labels):
    return {str(lab): j for j, lab in enumerate(labels)}


def model_rhs(coeffs, labels):
    """Vectorized ``f(u)`` for re-simulating an identified model.

    Only the terms with a nonzero coefficient in some equation are evaluated.
    """
    C = np.asarray(coeffs, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    if C.shape[0] != len(labels):
        raise ValueError(f"{C.shape[0]} coefficient rows for {len(labels)} labels")
    keep = np.flatnonzero(np.any(C != 0, axis=1))
    C = C[keep]
    d = len(labels[0].exponents)
    exps = np.array([labels[j].exponents for j in keep], dtype=float).reshape(len(keep), d)
    kinds = [labels[j].kind for j in keep]
    is_const = np.array([k == CONSTANT for k in kinds], dtype=bool)
    is_sin = np.array([k == SIN for k in kinds], dtype=bool)
    is_cos = np.array([k == COS for k in kinds], dtype=bool)

    def f(u):
        v = np.prod(np.asarray(u, dtype=float) ** exps, axis=1)
        v[is_const] = 1.0
        v[is_sin] = np.sin(v[is_sin])
        v[is_cos] = np.cos(v[is_cos])
        return v @ C

    return f
