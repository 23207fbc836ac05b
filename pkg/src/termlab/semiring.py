"""The free semiring over an alphabet, expansion steps, and certificates.

Elements are finite multisets of words.  A polynomial is kept in canonical
form: its words sorted lexicographically by symbol id, repetitions explicit.
A single expansion rewrites one summand u = v.w into the polynomial v.e.w
for an equation e read as "e = 1"; two polynomials are congruent modulo the
equations exactly when they have a common expansion, so a certificate is a
pair of replayable step lists meeting at one polynomial.

Step indices address the canonical word list of the polynomial they apply
to, which makes certificates portable byte streams: the line format written
by `write_certificate` is replayed verbatim by `read_certificate` plus
`verify_certificate`.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import BudgetExceeded, InputError

Word = tuple[int, ...]


class Alphabet:
    """Ordered generator names; words are tuples of name indices."""

    def __init__(self, symbols: Iterable[str]):
        self.symbols = tuple(symbols)
        self._ids = {s: i for i, s in enumerate(self.symbols)}
        if len(self._ids) != len(self.symbols):
            raise InputError("alphabet has duplicate symbols")
        for s in self.symbols:
            if not s or "+" in s or "." in s or " " in s:
                raise InputError(f"bad alphabet symbol {s!r}")

    def id(self, symbol: str) -> int:
        try:
            return self._ids[symbol]
        except KeyError:
            raise InputError(f"unknown alphabet symbol {symbol!r}") from None

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols


@dataclass(frozen=True)
class Polynomial:
    """Canonical multiset of words: a sorted tuple, one entry per copy."""

    words: tuple[Word, ...]

    @staticmethod
    def of(words: Iterable[Sequence[int]]) -> "Polynomial":
        return Polynomial(tuple(sorted(tuple(w) for w in words)))

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial(())

    @staticmethod
    def one() -> "Polynomial":
        return Polynomial(((),))

    @staticmethod
    def integer(n: int) -> "Polynomial":
        if n < 0:
            raise InputError(f"no negative polynomials, got {n}")
        return Polynomial(((),) * n)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial.of(self.words + other.words)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial.of(u + v for u in self.words for v in other.words)

    def __len__(self) -> int:
        return len(self.words)

    def symbol_count(self) -> int:
        return sum(len(w) for w in self.words)

    def multiplicity(self, word: Sequence[int]) -> int:
        return self.words.count(tuple(word))

    def monomials(self) -> list[tuple[Word, int]]:
        """Distinct words with explicit multiplicities, in canonical order."""
        out: list[tuple[Word, int]] = []
        for w in self.words:
            if out and out[-1][0] == w:
                out[-1] = (w, out[-1][1] + 1)
            else:
                out.append((w, 1))
        return out

    def remove(self, word: Word) -> "Polynomial":
        i = bisect.bisect_left(self.words, word)
        if i >= len(self.words) or self.words[i] != word:
            raise InputError(f"word {word} not present")
        return Polynomial(self.words[:i] + self.words[i + 1 :])


@dataclass(frozen=True)
class ExpansionStep:
    """Expand the summand at `summand` (canonical index), split at `split`,
    inserting equation `equation` between the two halves."""

    summand: int
    split: int
    equation: int


@dataclass(frozen=True)
class EquationSet:
    """Equations e_i = 1, each e_i a polynomial over a shared alphabet."""

    alphabet: Alphabet
    equations: tuple[Polynomial, ...]

    def __post_init__(self):
        for e in self.equations:
            if len(e) == 0:
                raise InputError("an equation polynomial must have at least one summand")

    def all_growing(self) -> bool:
        return all(len(e) >= 2 for e in self.equations)


@dataclass(frozen=True)
class Certificate:
    """Replayable proof of left ~ right via the common expansion `common`."""

    left: Polynomial
    right: Polynomial
    left_steps: tuple[ExpansionStep, ...]
    right_steps: tuple[ExpansionStep, ...]
    common: Polynomial

    def flipped(self) -> "Certificate":
        return Certificate(
            self.right, self.left, self.right_steps, self.left_steps, self.common
        )


def expand_word(word: Word, split: int, equation: Polynomial) -> Polynomial:
    """All monomials word[:split] . e . word[split:]."""
    if not (0 <= split <= len(word)):
        raise InputError(f"split {split} out of range for word of length {len(word)}")
    v, w = word[:split], word[split:]
    return Polynomial.of(v + e + w for e in equation.words)


def apply_step(p: Polynomial, step: ExpansionStep, eqs: EquationSet) -> Polynomial:
    if not (0 <= step.summand < len(p.words)):
        raise InputError(f"summand index {step.summand} out of range ({len(p.words)} summands)")
    if not (0 <= step.equation < len(eqs.equations)):
        raise InputError(f"equation index {step.equation} out of range")
    word = p.words[step.summand]
    inserted = expand_word(word, step.split, eqs.equations[step.equation])
    return p.remove(word) + inserted


def single_expansions(p: Polynomial, eqs: EquationSet) -> list[Polynomial]:
    """All polynomials one expansion step away, deduplicated, in canonical order."""
    seen = set()
    out = []
    for word, _count in p.monomials():
        rest = p.remove(word)
        for split in range(len(word) + 1):
            for e in eqs.equations:
                q = rest + expand_word(word, split, e)
                if q.words not in seen:
                    seen.add(q.words)
                    out.append(q)
    out.sort(key=lambda q: q.words)
    return out


def replay(p: Polynomial, steps: Sequence[ExpansionStep], eqs: EquationSet) -> Polynomial:
    current = p
    for ordinal, step in enumerate(steps):
        try:
            current = apply_step(current, step, eqs)
        except InputError as exc:
            raise InputError(f"step {ordinal}: {exc}") from None
    return current


def verify_certificate(cert: Certificate, eqs: EquationSet) -> bool:
    """Both step lists must replay exactly onto the claimed common expansion."""
    try:
        left_end = replay(cert.left, cert.left_steps, eqs)
        right_end = replay(cert.right, cert.right_steps, eqs)
    except InputError:
        return False
    return left_end == cert.common == right_end


# --- parallel expansions: several summands of one polynomial, one step each.
#
# An "action" (word, split, equation) expands one copy of `word`.  A list of
# actions with at most multiplicity(word) actions per word is exactly one
# step of the summand-subset ordering; `actions_to_steps` serializes it into
# index-addressed steps against the evolving canonical form, which is valid
# because copies of equal words are interchangeable.

Action = tuple[Word, int, int]


def apply_actions(p: Polynomial, actions: Sequence[Action], eqs: EquationSet) -> Polynomial:
    current = p
    for word, split, eq in sorted(actions):
        inserted = expand_word(word, split, eqs.equations[eq])
        current = current.remove(word) + inserted
    return current


def actions_to_steps(
    p: Polynomial, actions: Sequence[Action], eqs: EquationSet
) -> list[ExpansionStep]:
    steps = []
    current = p
    for word, split, eq in sorted(actions):
        index = bisect.bisect_left(current.words, word)
        if index >= len(current.words) or current.words[index] != word:
            raise InputError(f"action targets missing word {word}")
        step = ExpansionStep(index, split, eq)
        steps.append(step)
        current = apply_step(current, step, eqs)
    return steps


def infer_actions(
    r: Polynomial, p: Polynomial, eqs: EquationSet
) -> list[Action] | None:
    """Recognize p as r with a subset of its summands expanded once each.

    Returns one action per expanded copy, or None if p is not reachable that
    way.  Backtracking multiset matching; deterministic.
    """

    def match(remaining: list[Word], pool: Polynomial) -> list[Action] | None:
        if not remaining:
            return [] if len(pool) == 0 else None
        word = remaining[0]
        rest = remaining[1:]
        # keep the copy unexpanded
        if pool.multiplicity(word) > 0:
            sub = match(rest, pool.remove(word))
            if sub is not None:
                return sub
        # or expand it with some split and equation
        tried = set()
        for split in range(len(word) + 1):
            for ei, e in enumerate(eqs.equations):
                inserted = expand_word(word, split, e)
                if inserted.words in tried:
                    continue
                tried.add(inserted.words)
                reduced = pool
                ok = True
                for w in inserted.words:
                    if reduced.multiplicity(w) == 0:
                        ok = False
                        break
                    reduced = reduced.remove(w)
                if not ok:
                    continue
                sub = match(rest, reduced)
                if sub is not None:
                    return [(word, split, ei)] + sub
        return None

    return match(list(r.words), p)


@dataclass(frozen=True)
class DiamondResult:
    common: Polynomial
    p_steps: tuple[ExpansionStep, ...]
    q_steps: tuple[ExpansionStep, ...]


def _join_actions(
    r: Polynomial, a_actions: Sequence[Action], b_actions: Sequence[Action], eqs: EquationSet
) -> tuple[Polynomial, list[Action], list[Action]]:
    """Close one diamond: r expands to p by A and to q by B; build the join s
    with action lists p -> s and q -> s.

    Actions are paired per word copy, sorted, so copies hit by both sides are
    double-inserted at the earlier position first; the monomials an insertion
    produced then each receive the other insertion at the shifted offset.
    """
    by_word_a: dict[Word, list[Action]] = {}
    for act in sorted(a_actions):
        by_word_a.setdefault(act[0], []).append(act)
    by_word_b: dict[Word, list[Action]] = {}
    for act in sorted(b_actions):
        by_word_b.setdefault(act[0], []).append(act)

    for word in set(by_word_a) | set(by_word_b):
        need = max(
            len(by_word_a.get(word, [])), len(by_word_b.get(word, []))
        )
        if r.multiplicity(word) < need:
            raise InputError(f"actions exceed multiplicity of {word} in the base")

    s_parts: list[Polynomial] = []
    from_p: list[Action] = []
    from_q: list[Action] = []

    for word, count in r.monomials():
        acts_a = by_word_a.get(word, [])
        acts_b = by_word_b.get(word, [])
        for i in range(count):
            a = acts_a[i] if i < len(acts_a) else None
            b = acts_b[i] if i < len(acts_b) else None
            if a is None and b is None:
                s_parts.append(Polynomial.of([word]))
            elif b is None:
                expanded = expand_word(word, a[1], eqs.equations[a[2]])
                s_parts.append(expanded)
                from_q.append(a)
            elif a is None:
                expanded = expand_word(word, b[1], eqs.equations[b[2]])
                s_parts.append(expanded)
                from_p.append(b)
            elif a == b:
                expanded = expand_word(word, a[1], eqs.equations[a[2]])
                s_parts.append(expanded)
            else:
                first, second = (a, b) if (a[1], a[2]) <= (b[1], b[2]) else (b, a)
                _, alpha, ea = first
                _, beta, eb = second
                mid = word[alpha:beta]
                suffix = word[beta:]
                prefix = word[:alpha]
                ea_poly = eqs.equations[ea]
                eb_poly = eqs.equations[eb]
                cell = Polynomial.of(
                    prefix + u + mid + v + suffix
                    for u in ea_poly.words
                    for v in eb_poly.words
                )
                s_parts.append(cell)
                # the side that already has `first` inserted needs `second`,
                # once per monomial of the first insertion, and vice versa
                first_done = [prefix + u + mid + suffix for u in ea_poly.words]
                second_done = [prefix + mid + v + suffix for v in eb_poly.words]
                first_needs = [(w, beta + len(u), eb) for w, u in zip(first_done, ea_poly.words)]
                second_needs = [(w, alpha, ea) for w in second_done]
                if first == a:
                    from_p.extend(first_needs)
                    from_q.extend(second_needs)
                else:
                    from_p.extend(second_needs)
                    from_q.extend(first_needs)

    s = Polynomial.zero()
    for part in s_parts:
        s = s + part
    return s, from_p, from_q


def diamond_join(
    r: Polynomial,
    p: Polynomial,
    q: Polynomial,
    eqs: EquationSet,
    r_to_p: Sequence[Action] | None = None,
    r_to_q: Sequence[Action] | None = None,
) -> DiamondResult:
    """Join two one-shot expansions of r into a common upper bound.

    p and q must each arise from r by expanding a subset of its summands once
    (the summand-subset ordering); the witnessing actions are inferred when
    not supplied.  The result replays from both sides by construction.
    """
    if r_to_p is None:
        r_to_p = infer_actions(r, p, eqs)
        if r_to_p is None:
            raise InputError("p is not a one-shot summand expansion of r")
    if r_to_q is None:
        r_to_q = infer_actions(r, q, eqs)
        if r_to_q is None:
            raise InputError("q is not a one-shot summand expansion of r")
    if apply_actions(r, r_to_p, eqs) != p:
        raise InputError("supplied r->p actions do not produce p")
    if apply_actions(r, r_to_q, eqs) != q:
        raise InputError("supplied r->q actions do not produce q")

    s, from_p, from_q = _join_actions(r, r_to_p, r_to_q, eqs)
    p_steps = actions_to_steps(p, from_p, eqs)
    q_steps = actions_to_steps(q, from_q, eqs)
    if apply_actions(p, from_p, eqs) != s or apply_actions(q, from_q, eqs) != s:
        raise AssertionError("internal error: diamond join does not replay")
    return DiamondResult(s, tuple(p_steps), tuple(q_steps))




def _step_actions(
    start: Polynomial, steps: Sequence[ExpansionStep], eqs: EquationSet
) -> tuple[list[Polynomial], list[list[Action]]]:
    """Unroll a step list into its polynomial chain and one action per step."""
    chain = [start]
    edges: list[list[Action]] = []
    current = start
    for step in steps:
        word = current.words[step.summand]
        edges.append([(word, step.split, step.equation)])
        current = apply_step(current, step, eqs)
        chain.append(current)
    return chain, edges


def _walk(start: Polynomial, edges: Sequence[Sequence[Action]], eqs: EquationSet
          ) -> tuple[Polynomial, list[ExpansionStep]]:
    steps: list[ExpansionStep] = []
    current = start
    for edge in edges:
        steps.extend(actions_to_steps(current, edge, eqs))
        current = apply_actions(current, edge, eqs)
    return current, steps


def compose_certificates(c1: Certificate, c2: Certificate, eqs: EquationSet) -> Certificate:
    """Transitivity: from c1: p ~ q and c2: q ~ r build p ~ r.

    The two expansion chains out of the shared endpoint q are tiled into a
    P x Q grid of diamond joins.  Rows advance toward c1.common, columns
    toward c2.common; the far corner is the new common expansion, reached
    from c1.common along the last row and from c2.common down the last
    column.
    """
    if c1.right != c2.left:
        raise InputError("certificates do not share an endpoint")

    _, row_edges = _step_actions(c1.right, c1.right_steps, eqs)
    col_chain, col_edges = _step_actions(c2.left, c2.left_steps, eqs)

    grid_row = col_chain              # row 0: q ... c2.common
    right = [list(e) for e in col_edges]   # right edges of the current row
    last_col_down: list[list[Action]] = []  # down edges of the last column
    for i in range(len(row_edges)):
        down = list(row_edges[i])     # down edge entering column 0
        new_row = [apply_actions(grid_row[0], down, eqs)]
        new_right: list[list[Action]] = []
        for j in range(len(right)):
            s, from_down, from_right = _join_actions(grid_row[j], down, right[j], eqs)
            new_row.append(s)
            new_right.append(from_down)
            down = from_right
        last_col_down.append(down)
        grid_row = new_row
        right = new_right

    corner, left_extra = _walk(grid_row[0], right, eqs)
    corner2, right_extra = _walk(col_chain[-1], last_col_down, eqs)
    if corner != corner2:
        raise AssertionError("internal error: grid corners disagree")

    cert = Certificate(
        c1.left,
        c2.right,
        tuple(c1.left_steps) + tuple(left_extra),
        tuple(c2.right_steps) + tuple(right_extra),
        corner,
    )
    if not verify_certificate(cert, eqs):
        raise AssertionError("internal error: composed certificate does not verify")
    return cert


def cert_context(
    cert: Certificate,
    left: Polynomial,
    right: Polynomial,
    addend: Polynomial,
    eqs: EquationSet,
) -> Certificate:
    """Lift a certificate through a product-and-sum context.

    From p ~ q build left.p.right + addend ~ left.q.right + addend.  Every
    original step on a summand u becomes one step per (l, r) monomial pair of
    the context, expanding l.u.r at the shifted split; the addend rides along
    untouched.
    """

    def lift(start: Polynomial, steps: Sequence[ExpansionStep]) -> tuple[Polynomial, list[ExpansionStep]]:
        inner = start
        outer = left * inner * right + addend
        lifted: list[ExpansionStep] = []
        for ordinal, step in enumerate(steps):
            try:
                word = inner.words[step.summand]
            except IndexError:
                raise InputError(f"step {ordinal}: summand out of range") from None
            for l in left.words:
                for r in right.words:
                    target = l + word + r
                    index = bisect.bisect_left(outer.words, target)
                    if index >= len(outer.words) or outer.words[index] != target:
                        raise AssertionError("internal error: lifted word missing")
                    out_step = ExpansionStep(index, len(l) + step.split, step.equation)
                    lifted.append(out_step)
                    outer = apply_step(outer, out_step, eqs)
            inner = apply_step(inner, step, eqs)
        if outer != left * inner * right + addend:
            raise AssertionError("internal error: context lift drifted")
        return outer, lifted

    left_end, left_steps = lift(cert.left, cert.left_steps)
    right_end, right_steps = lift(cert.right, cert.right_steps)
    if left_end != right_end:
        raise AssertionError("internal error: context lift endpoints disagree")
    return Certificate(
        left * cert.left * right + addend,
        left * cert.right * right + addend,
        tuple(left_steps),
        tuple(right_steps),
        left_end,
    )


def expand_search(
    p: Polynomial, q: Polynomial, eqs: EquationSet, max_summands: int = 10_000
) -> Certificate | None:
    """Bidirectional bounded search for a common expansion of p and q.

    Only a semi-decision: a certificate is returned when the frontiers meet;
    exhausting the budget raises BudgetExceeded.  Requires every equation to
    have at least two summands so that the summand count strictly grows and
    levels are finite.
    """
    if not eqs.all_growing():
        raise InputError(
            "expand_search needs strictly growing equations "
            "(every equation with at least 2 summands)"
        )
    if p == q:
        return Certificate(p, q, (), (), p)

    parents: dict[tuple, dict[tuple[Word, ...], tuple]] = {"p": {p.words: None}, "q": {q.words: None}}
    frontier = {"p": [p], "q": [q]}
    stored = len(p) + len(q)

    def build_steps(side: str, end: Polynomial) -> list[ExpansionStep]:
        # walk parent links back to the root, then re-derive the step list
        chain = []
        node = end.words
        while node is not None:
            chain.append(node)
            node = parents[side][node][0] if parents[side][node] else None
        chain.reverse()
        steps = []
        for a, b in zip(chain, chain[1:]):
            steps.append(parents[side][b][1])
        return steps

    while frontier["p"] or frontier["q"]:
        # expand the side whose frontier polynomials are currently smaller
        side = min(
            ("p", "q"),
            key=lambda s: min((len(f) for f in frontier[s]), default=1 << 60),
        )
        new_frontier = []
        for base in frontier[side]:
            for word, _ in base.monomials():
                rest = base.remove(word)
                for split in range(len(word) + 1):
                    for ei, e in enumerate(eqs.equations):
                        candidate = rest + expand_word(word, split, e)
                        if candidate.words in parents[side]:
                            continue
                        index = bisect.bisect_left(base.words, word)
                        parents[side][candidate.words] = (
                            base.words,
                            ExpansionStep(index, split, ei),
                        )
                        stored += len(candidate)
                        if stored > max_summands:
                            raise BudgetExceeded(
                                f"summand budget {max_summands} exceeded in expand_search"
                            )
                        other = "q" if side == "p" else "p"
                        if candidate.words in parents[other]:
                            left_steps = build_steps("p", candidate)
                            right_steps = build_steps("q", candidate)
                            cert = Certificate(
                                p, q, tuple(left_steps), tuple(right_steps), candidate
                            )
                            if not verify_certificate(cert, eqs):
                                raise AssertionError("internal error: search certificate invalid")
                            return cert
                        new_frontier.append(candidate)
        frontier[side] = new_frontier
    return None


# --- certificate files: a header, then one step per line.

def polynomial_to_text(p: Polynomial, alphabet: Alphabet) -> str:
    if len(p) == 0:
        return "0"
    parts = []
    for w in p.words:
        parts.append(".".join(alphabet.symbols[s] for s in w) if w else "1")
    return "+".join(parts)


def polynomial_from_text(text: str, alphabet: Alphabet) -> Polynomial:
    text = text.strip()
    if text == "0":
        return Polynomial.zero()
    words = []
    for part in text.split("+"):
        part = part.strip()
        if part == "1":
            words.append(())
        elif not part:
            raise InputError(f"empty summand in polynomial text {text!r}")
        else:
            words.append(tuple(alphabet.id(s) for s in part.split(".")))
    return Polynomial.of(words)


def write_certificate(cert: Certificate, alphabet: Alphabet) -> str:
    lines = [
        "alphabet " + " ".join(alphabet.symbols),
        "left " + polynomial_to_text(cert.left, alphabet),
        "right " + polynomial_to_text(cert.right, alphabet),
        "common " + polynomial_to_text(cert.common, alphabet),
    ]
    for side, steps in (("L", cert.left_steps), ("R", cert.right_steps)):
        for step in steps:
            lines.append(f"{side} {step.summand} {step.split} {step.equation}")
    return "\n".join(lines) + "\n"


def read_certificate(text: str) -> tuple[Certificate, Alphabet]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) < 4:
        raise InputError("certificate file too short")
    fields = {}
    for i, key in enumerate(("alphabet", "left", "right", "common")):
        name, _, rest = lines[i].partition(" ")
        if name != key:
            raise InputError(f"certificate line {i + 1}: expected {key!r} header")
        fields[key] = rest
    alphabet = Alphabet(fields["alphabet"].split())
    left = polynomial_from_text(fields["left"], alphabet)
    right = polynomial_from_text(fields["right"], alphabet)
    common = polynomial_from_text(fields["common"], alphabet)
    left_steps = []
    right_steps = []
    for line in lines[4:]:
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("L", "R"):
            raise InputError(f"bad step line {line!r}")
        try:
            step = ExpansionStep(int(parts[1]), int(parts[2]), int(parts[3]))
        except ValueError:
            raise InputError(f"bad step line {line!r}") from None
        (left_steps if parts[0] == "L" else right_steps).append(step)
    return (
        Certificate(left, right, tuple(left_steps), tuple(right_steps), common),
        alphabet,
    )
