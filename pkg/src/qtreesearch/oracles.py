"""Bit-string plumbing and the oracle families used by the search strategies.

Conventions, fixed package-wide:

* textual bit-strings are written most-significant bit first,
* integer patterns are little-endian: bit q of the integer is variable q,
* variable numbering in the signed-literal grammar is 1-based, so the
  signed literal ``-3`` means "variable 3 must be 0" and addresses bit 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigurationError, PreconditionError, ValidationError

DESK_SCALE_STATES = 2**20


def _check_bits(bits: str, what: str = "bit-string") -> None:
    if not isinstance(bits, str) or any(c not in "01" for c in bits):
        raise ConfigurationError(f"{what} must contain only '0'/'1': {bits!r}")


def concat(upper_bits: str, lower_bits: str) -> str:
    """Join an upper and a lower bit-string, upper bits on the left."""
    _check_bits(upper_bits, "upper bits")
    _check_bits(lower_bits, "lower bits")
    return upper_bits + lower_bits


def split(bits: str, lower_width: int) -> tuple[str, str]:
    """Split a bit-string into (upper, lower) with ``lower_width`` low bits."""
    _check_bits(bits)
    if not 0 <= lower_width < len(bits):
        raise ConfigurationError(
            f"lower width must satisfy 0 <= g < len(bits), got g={lower_width} "
            f"for {len(bits)} bits"
        )
    cut = len(bits) - lower_width
    return bits[:cut], bits[cut:]


def bits_to_int(bits: str) -> int:
    _check_bits(bits)
    if not bits:
        raise ConfigurationError("empty bit-string has no integer value")
    return int(bits, 2)


def int_to_bits(value: int, width: int) -> str:
    if width < 1:
        raise ConfigurationError(f"width must be positive, got {width}")
    if not 0 <= value < 2**width:
        raise ConfigurationError(f"value {value} does not fit in {width} bits")
    return format(value, f"0{width}b")


@dataclass(frozen=True)
class ConjunctionOracle:
    """Conjunction of signed literals over ``width`` variables.

    ``literals`` holds (position, required value) pairs with 0-based
    little-endian positions. Positions not mentioned are free, so the oracle
    marks ``2**(width - len(literals))`` patterns.
    """

    width: int
    literals: tuple[tuple[int, bool], ...]

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ConfigurationError(f"oracle width must be >= 1, got {self.width}")
        positions = [p for p, _ in self.literals]
        if len(set(positions)) != len(positions):
            raise ValidationError(f"duplicate literal positions: {sorted(positions)}")
        bad = [p for p in positions if not 0 <= p < self.width]
        if bad:
            raise ConfigurationError(
                f"literal positions {bad} outside width {self.width}"
            )
        object.__setattr__(
            self, "literals", tuple((int(p), bool(v)) for p, v in self.literals)
        )

    @classmethod
    def from_signed_literals(cls, signed: Sequence[int], width: int) -> ConjunctionOracle:
        """Build from 1-based signed variable indices, e.g. [-3, 2, 1]."""
        literals = []
        for s in signed:
            if not isinstance(s, int) or s == 0:
                raise ConfigurationError(f"signed literal must be a nonzero int, got {s!r}")
            literals.append((abs(s) - 1, s > 0))
        return cls(width=width, literals=tuple(literals))

    @classmethod
    def matching(cls, bits: str) -> ConjunctionOracle:
        """Fully specified conjunction marking exactly one bit-string."""
        _check_bits(bits)
        width = len(bits)
        value = bits_to_int(bits)
        return cls(
            width=width,
            literals=tuple((q, bool((value >> q) & 1)) for q in range(width)),
        )

    def __call__(self, pattern: int) -> bool:
        return all(((pattern >> p) & 1) == v for p, v in self.literals)

    @property
    def marked_count(self) -> int:
        return 2 ** (self.width - len(self.literals))

    def marked_states(self) -> tuple[int, ...]:
        if 2**self.width > DESK_SCALE_STATES:
            raise ConfigurationError(f"enumeration over 2**{self.width} states refused")
        return tuple(p for p in range(2**self.width) if self(p))

    @property
    def marked_state(self) -> int:
        """The single marked pattern; requires a fully specified conjunction."""
        if self.marked_count != 1:
            raise PreconditionError(
                f"oracle marks {self.marked_count} states, expected exactly 1"
            )
        value = 0
        for p, v in self.literals:
            value |= int(v) << p
        return value

    def signed_literals(self) -> list[int]:
        return sorted(((p + 1) if v else -(p + 1) for p, v in self.literals), key=abs)


@dataclass(frozen=True)
class MarkedSetOracle:
    """Membership oracle for an explicit set of marked patterns."""

    width: int
    marked: frozenset[int]

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ConfigurationError(f"oracle width must be >= 1, got {self.width}")
        object.__setattr__(self, "marked", frozenset(int(x) for x in self.marked))
        bad = [x for x in self.marked if not 0 <= x < 2**self.width]
        if bad:
            raise ConfigurationError(f"marked patterns {bad} outside width {self.width}")

    def __call__(self, pattern: int) -> bool:
        return pattern in self.marked

    @property
    def marked_count(self) -> int:
        return len(self.marked)


@dataclass(frozen=True)
class ConcatenatedOracle:
    """Global oracle built as upper(z) AND lower(y) on an m-bit register.

    The lower part reads the low ``lower.width`` bits, the upper part the
    rest. Both parts must be fully specified so the oracle marks exactly one
    m-bit string, the concatenation of the two marked sub-strings.
    """

    upper: ConjunctionOracle
    lower: ConjunctionOracle

    def __post_init__(self) -> None:
        if self.upper.marked_count != 1 or self.lower.marked_count != 1:
            raise ValidationError(
                "both halves of a concatenated oracle must mark exactly one string"
            )

    @property
    def split(self) -> int:
        return self.lower.width

    @property
    def width(self) -> int:
        return self.upper.width + self.lower.width

    def __call__(self, pattern: int) -> bool:
        g = self.split
        return self.lower(pattern & ((1 << g) - 1)) and self.upper(pattern >> g)

    @property
    def marked_count(self) -> int:
        return 1

    @property
    def solution(self) -> int:
        return (self.upper.marked_state << self.split) | self.lower.marked_state

    @property
    def solution_bits(self) -> str:
        return int_to_bits(self.solution, self.width)


@dataclass(frozen=True)
class PartialCandidateSet:
    """Ordered set of distinct lower-register candidate strings.

    Doubles as the membership oracle used when the candidate register is
    prepared by amplitude amplification.
    """

    width: int
    candidates: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ConfigurationError(f"candidate width must be >= 1, got {self.width}")
        values = tuple(int(c) for c in self.candidates)
        if len(set(values)) != len(values):
            raise ValidationError(f"duplicate candidates: {values}")
        if not values:
            raise ConfigurationError("candidate set may not be empty")
        bad = [c for c in values if not 0 <= c < 2**self.width]
        if bad:
            raise ConfigurationError(f"candidates {bad} outside width {self.width}")
        object.__setattr__(self, "candidates", values)

    @classmethod
    def from_strings(cls, strings: Iterable[str]) -> PartialCandidateSet:
        strings = list(strings)
        if not strings:
            raise ConfigurationError("candidate set may not be empty")
        widths = {len(s) for s in strings}
        if len(widths) != 1:
            raise ConfigurationError(f"candidates must share one width, got {widths}")
        return cls(width=widths.pop(), candidates=tuple(bits_to_int(s) for s in strings))

    @classmethod
    def from_oracles(cls, oracles: Sequence[ConjunctionOracle]) -> PartialCandidateSet:
        if not oracles:
            raise ConfigurationError("candidate set may not be empty")
        widths = {o.width for o in oracles}
        if len(widths) != 1:
            raise ConfigurationError(f"candidate oracles must share one width, got {widths}")
        return cls(width=widths.pop(), candidates=tuple(o.marked_state for o in oracles))

    def __call__(self, pattern: int) -> bool:
        return pattern in self.candidates

    @property
    def size(self) -> int:
        return len(self.candidates)

    @property
    def marked_count(self) -> int:
        return self.size

    def candidate(self, k: int) -> int:
        """The k-th candidate, 1-based."""
        if not 1 <= k <= self.size:
            raise ConfigurationError(f"candidate index {k} outside 1..{self.size}")
        return self.candidates[k - 1]

    def strings(self) -> tuple[str, ...]:
        return tuple(int_to_bits(c, self.width) for c in self.candidates)

    def index_of(self, pattern: int) -> int | None:
        try:
            return self.candidates.index(pattern) + 1
        except ValueError:
            return None


def candidate_oracle(candidates: PartialCandidateSet, k: int) -> ConjunctionOracle:
    """Fully specified conjunction marking only the k-th candidate (1-based)."""
    value = candidates.candidate(k)
    return ConjunctionOracle.matching(int_to_bits(value, candidates.width))


def eval_oracle(oracle, bits: str) -> int:
    """Classical evaluation of a single-input oracle on one bit-string."""
    _check_bits(bits)
    if len(bits) != oracle.width:
        raise ConfigurationError(
            f"bit-string width {len(bits)} does not match oracle width {oracle.width}"
        )
    return int(bool(oracle(bits_to_int(bits))))


@dataclass(frozen=True)
class FlaggedUpperOracle:
    """Upper-register oracle gated by a flag bit.

    evaluate(z, flag) is true only when the upper pattern equals the target
    and the flag is set. With the flag carrying "candidate k matches the
    lower part of the solution", this restriction of the global oracle to
    one upper block is what each disentangled search block amplifies with.
    """

    width: int
    upper_target: int
    flag_index: int

    def __post_init__(self) -> None:
        if not 0 <= self.upper_target < 2**self.width:
            raise ConfigurationError(
                f"target {self.upper_target} outside width {self.width}"
            )
        if self.flag_index < 1:
            raise ConfigurationError(f"flag index is 1-based, got {self.flag_index}")

    def evaluate(self, upper_pattern: int, flag: int) -> bool:
        if flag not in (0, 1):
            raise ConfigurationError(f"flag must be 0 or 1, got {flag}")
        return flag == 1 and upper_pattern == self.upper_target


@dataclass(frozen=True)
class BasisLabel:
    """Basis-state label: an integer plus the register width it is read in."""

    value: int
    width: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < 2**self.width:
            raise ConfigurationError(f"value {self.value} does not fit in {self.width} bits")

    def __str__(self) -> str:
        return int_to_bits(self.value, self.width)

    @classmethod
    def from_string(cls, bits: str) -> BasisLabel:
        return cls(value=bits_to_int(bits), width=len(bits))


@dataclass(frozen=True)
class PathDescriptor:
    """A root-to-leaf path in a uniform tree: one digit in [0, B) per level."""

    branching: int
    depth: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.branching < 2:
            raise ConfigurationError(f"branching must be >= 2, got {self.branching}")
        if self.depth < 1:
            raise ConfigurationError(f"depth must be >= 1, got {self.depth}")
        if len(self.digits) != self.depth:
            raise ConfigurationError(
                f"expected {self.depth} digits, got {len(self.digits)}"
            )
        bad = [d for d in self.digits if not 0 <= d < self.branching]
        if bad:
            raise ConfigurationError(f"digits {bad} outside base {self.branching}")
        if self.branching**self.depth > DESK_SCALE_STATES:
            raise ConfigurationError(
                f"{self.branching}**{self.depth} paths exceed the desk-scale cap"
            )


def _label_width(branching: int, depth: int) -> int:
    if branching == 2:
        return depth
    return max(1, (branching**depth - 1).bit_length())


def path_encode(path: PathDescriptor) -> BasisLabel:
    """Rank the path, first digit most significant, into a basis label."""
    value = 0
    for d in path.digits:
        value = value * path.branching + d
    return BasisLabel(value=value, width=_label_width(path.branching, path.depth))


def path_decode(value: int, branching: int, depth: int) -> PathDescriptor:
    if branching < 2 or depth < 1:
        raise ConfigurationError("branching must be >= 2 and depth >= 1")
    if branching**depth > DESK_SCALE_STATES:
        raise ConfigurationError(f"{branching}**{depth} paths exceed the desk-scale cap")
    if not 0 <= value < branching**depth:
        raise ConfigurationError(
            f"value {value} outside [0, {branching}**{depth})"
        )
    digits = []
    for _ in range(depth):
        digits.append(value % branching)
        value //= branching
    return PathDescriptor(branching=branching, depth=depth, digits=tuple(reversed(digits)))


def reduced_branching(branching: int) -> float:
    """Effective branching factor once each level is searched quadratically faster."""
    if branching < 2:
        raise ConfigurationError(f"branching must be >= 2, got {branching}")
    return math.sqrt(branching)
