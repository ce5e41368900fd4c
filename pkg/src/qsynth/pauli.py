"""Phase-tracked Pauli strings and real-weighted Pauli sums.

Qubit indices are global (boson, fermion, auxiliary and ancilla qubits share
one index space). Identity letters are never stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

DROP_TOL = 1e-14

# (a, b) -> (power of i, letter) for the single-qubit product a*b
_PRODUCT = {
    ("X", "X"): (0, None),
    ("Y", "Y"): (0, None),
    ("Z", "Z"): (0, None),
    ("X", "Y"): (1, "Z"),
    ("Y", "X"): (3, "Z"),
    ("Y", "Z"): (1, "X"),
    ("Z", "Y"): (3, "X"),
    ("Z", "X"): (1, "Y"),
    ("X", "Z"): (3, "Y"),
}

_PHASES = {0: 1, 1: 1j, 2: -1, 3: -1j}
_POWERS = {1: 0, 1j: 1, -1: 2, -1j: 3}


def _phase_power(phase) -> int:
    for value, power in _POWERS.items():
        if abs(complex(phase) - value) < 1e-12:
            return power
    raise ValueError(f"phase must be one of +1, -1, +i, -i, got {phase!r}")


@dataclass(frozen=True, order=True)
class PauliString:
    """A Pauli word ``i**power * prod_q sigma_q`` with sparse letters."""

    letters: tuple[tuple[int, str], ...] = ()
    power: int = 0

    def __post_init__(self):
        seen = set()
        for q, letter in self.letters:
            if letter not in ("X", "Y", "Z"):
                raise ValueError(f"invalid Pauli letter {letter!r}")
            if q < 0:
                raise ValueError(f"qubit index must be non-negative, got {q}")
            if q in seen:
                raise ValueError(f"duplicate qubit {q} in Pauli string")
            seen.add(q)
        object.__setattr__(self, "letters", tuple(sorted(self.letters)))
        object.__setattr__(self, "power", self.power % 4)

    @classmethod
    def from_map(cls, letters: Mapping[int, str], phase=1) -> "PauliString":
        return cls(tuple((q, p) for q, p in letters.items() if p != "I"), _phase_power(phase))

    @classmethod
    def from_label(cls, label: str, phase=1) -> "PauliString":
        """Parse ``"X0 Z3 Y4"``; an empty label is the identity."""
        letters = {}
        for token in label.split():
            letters[int(token[1:])] = token[0].upper()
        return cls.from_map(letters, phase)

    @classmethod
    def identity(cls) -> "PauliString":
        return cls()

    @property
    def phase(self) -> complex:
        return _PHASES[self.power]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.letters)

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def is_hermitian(self) -> bool:
        return self.power % 2 == 0

    def as_dict(self) -> dict[int, str]:
        return dict(self.letters)

    def with_phase(self, phase) -> "PauliString":
        return PauliString(self.letters, _phase_power(phase))

    def unsigned(self) -> "PauliString":
        return PauliString(self.letters, 0)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return mul(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.letters, self.power + 2)

    def label(self) -> str:
        return " ".join(f"{p}{q}" for q, p in self.letters)

    def __str__(self) -> str:
        prefix = {0: "", 1: "i ", 2: "- ", 3: "-i "}[self.power]
        return prefix + (self.label() or "I")


def mul(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a * b`` with exact phase."""
    power = a.power + b.power
    out = dict(a.letters)
    for q, lb in b.letters:
        la = out.get(q)
        if la is None:
            out[q] = lb
            continue
        k, letter = _PRODUCT[(la, lb)]
        power += k
        if letter is None:
            del out[q]
        else:
            out[q] = letter
    return PauliString(tuple(out.items()), power)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the two strings commute (even number of anticommuting sites)."""
    lb = dict(b.letters)
    clashes = sum(1 for q, la in a.letters if q in lb and lb[q] != la)
    return clashes % 2 == 0


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings.

    Construction does not canonicalize; call :func:`canonicalize` (or
    :meth:`canonical`) to fold signs, merge duplicates and drop zeros.
    """

    terms: tuple[tuple[float, PauliString], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(c), p) for c, p in self.terms))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, PauliString]]) -> "PauliSum":
        return cls(tuple(terms))

    @classmethod
    def from_labels(cls, terms: Iterable[tuple[float, str]]) -> "PauliSum":
        return cls(tuple((c, PauliString.from_label(lbl)) for c, lbl in terms))

    def __iter__(self) -> Iterator[tuple[float, PauliString]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return PauliSum(self.terms + other.terms)

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(tuple((c * scalar, p) for c, p in self.terms))

    __rmul__ = __mul__

    def canonical(self) -> "PauliSum":
        return canonicalize(self)

    @property
    def num_qubits(self) -> int:
        """One past the largest qubit index touched."""
        return max((q + 1 for _, p in self.terms for q in p.support), default=0)

    @property
    def one_norm(self) -> float:
        return sum(abs(c) for c, _ in self.terms)

    @property
    def max_weight(self) -> int:
        return max((p.weight for _, p in self.terms), default=0)

    def to_text(self) -> str:
        lines = []
        for c, p in self.terms:
            sign = "-" if p.power == 2 else ""
            lines.append(f"{sign}{c!r} {p.label()}".rstrip())
        return "\n".join(lines)

    __str__ = to_text


def canonicalize(s: PauliSum) -> PauliSum:
    acc: dict[tuple, float] = {}
    for c, p in s.terms:
        if not p.is_hermitian:
            raise ValueError(f"non-Hermitian string {p} in PauliSum (phase {p.phase})")
        if p.power == 2:
            c = -c
        acc[p.letters] = acc.get(p.letters, 0.0) + c
    terms = [(c, PauliString(k)) for k, c in sorted(acc.items(), key=lambda kv: _sort_key(kv[0]))
             if abs(c) >= DROP_TOL]
    return PauliSum(tuple(terms))


def _sort_key(letters: tuple) -> tuple:
    return (len(letters), letters)


@dataclass
class PauliPolynomial:
    """Complex-weighted Pauli sum used for intermediate fermion algebra.

    Keys are phase-free letter tuples; all phases live in the coefficients.
    """

    coeffs: dict[tuple, complex] = field(default_factory=dict)

    @classmethod
    def from_string(cls, p: PauliString, coeff: complex = 1.0) -> "PauliPolynomial":
        return cls({p.letters: coeff * p.phase})

    @classmethod
    def scalar(cls, value: complex) -> "PauliPolynomial":
        return cls({(): complex(value)})

    @classmethod
    def from_sum(cls, s: PauliSum) -> "PauliPolynomial":
        out = cls()
        for c, p in s.terms:
            out.add_term(p, c)
        return out

    def add_term(self, p: PauliString, coeff: complex) -> None:
        self.coeffs[p.letters] = self.coeffs.get(p.letters, 0.0) + coeff * p.phase

    def __add__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return PauliPolynomial(out)

    def __mul__(self, other) -> "PauliPolynomial":
        if not isinstance(other, PauliPolynomial):
            return PauliPolynomial({k: c * other for k, c in self.coeffs.items()})
        out: dict[tuple, complex] = {}
        for ka, ca in self.coeffs.items():
            pa = PauliString(ka)
            for kb, cb in other.coeffs.items():
                prod = mul(pa, PauliString(kb))
                out[prod.letters] = out.get(prod.letters, 0.0) + ca * cb * prod.phase
        return PauliPolynomial(out)

    def __rmul__(self, scalar) -> "PauliPolynomial":
        return self * scalar

    def adjoint(self) -> "PauliPolynomial":
        return PauliPolynomial({k: c.conjugate() for k, c in self.coeffs.items()})

    def pruned(self, tol: float = DROP_TOL) -> "PauliPolynomial":
        return PauliPolynomial({k: c for k, c in self.coeffs.items() if abs(c) >= tol})

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.coeffs.values())

    def is_zero(self, tol: float = DROP_TOL) -> bool:
        return all(abs(c) < tol for c in self.coeffs.values())

    def to_pauli_sum(self, tol: float = 1e-12) -> PauliSum:
        """Convert to a canonical real PauliSum; raises if not Hermitian."""
        terms = []
        for k, c in self.coeffs.items():
            c = complex(c)
            if abs(c.imag) > tol * max(1.0, abs(c)):
                raise ValueError(f"operator is not Hermitian: coefficient {c} on {PauliString(k)}")
            terms.append((c.real, PauliString(k)))
        return canonicalize(PauliSum(tuple(terms)))
