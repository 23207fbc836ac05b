"""Independent brute-force oracles the engine implementations are tested against.

These deliberately avoid the package's closure machinery: plain round-robin
fixpoint iteration over full cartesian products, recomputed from scratch each
pass.  Slow but unarguable at test scale.
"""

import itertools


def naive_closure(algebra, generators):
    """Round-robin fixpoint: the set of tuples generated coordinatewise."""
    members = {tuple(g) for g in generators}
    changed = True
    while changed:
        changed = False
        for op in algebra.ops:
            for rows in itertools.product(sorted(members), repeat=op.arity):
                out = tuple(
                    algebra.apply(op.name, [row[c] for row in rows])
                    for c in range(len(rows[0]))
                )
                if out not in members:
                    members.add(out)
                    changed = True
    return members


def naive_term_operations(algebra, k):
    """All k-ary term operation tables, by fixpoint from the projections."""
    width = algebra.size**k
    projections = []
    for i in range(k):
        stride = algebra.size ** (k - 1 - i)
        projections.append(
            tuple((idx // stride) % algebra.size for idx in range(width))
        )
    return naive_closure(algebra, projections)


def naive_schema_decision(algebra, schema):
    """Decide a schema by enumerating profile tuples over naive closures.

    A symbol witness with pattern evaluations (t1..tp) exists iff that tuple
    lies in the naive closure of the argument-position projection profiles,
    so a full product scan over symbols decides satisfiability.
    """
    k = len(schema.variables)
    term_ops = sorted(naive_term_operations(algebra, k))
    op_ids = {table: i for i, table in enumerate(term_ops)}

    width = algebra.size**k
    proj = []
    for i in range(k):
        stride = algebra.size ** (k - 1 - i)
        proj.append(op_ids[tuple((idx // stride) % algebra.size for idx in range(width))])

    # Profiles live over term-operation ids; operations act coordinatewise.
    class _ProfileAlgebra:
        size = len(term_ops)
        ops = algebra.ops

        @staticmethod
        def apply(name, args):
            rows = [term_ops[a] for a in args]
            out = tuple(
                algebra.apply(name, [row[c] for row in rows]) for c in range(width)
            )
            return op_ids[out]

    patterns = {sym: [] for sym, _ in schema.symbols}
    for ident in schema.identities:
        for sym, pat in (
            (ident.left_symbol, ident.left_pattern),
            (ident.right_symbol, ident.right_pattern),
        ):
            if pat not in patterns[sym]:
                patterns[sym].append(pat)

    pins = dict(schema.pins)
    per_symbol = []
    for sym, arity in schema.symbols:
        pats = patterns[sym]
        gens = [tuple(proj[pat[pos]] for pat in pats) for pos in range(arity)]
        if sym in pins:
            per_symbol.append([gens[pins[sym]] if pats else ()])
        elif not pats:
            per_symbol.append([()])
        else:
            per_symbol.append(sorted(naive_closure(_ProfileAlgebra, gens)))

    names = [sym for sym, _ in schema.symbols]
    for combo in itertools.product(*per_symbol):
        profiles = dict(zip(names, combo))
        ok = True
        for ident in schema.identities:
            li = patterns[ident.left_symbol].index(ident.left_pattern)
            ri = patterns[ident.right_symbol].index(ident.right_pattern)
            if profiles[ident.left_symbol][li] != profiles[ident.right_symbol][ri]:
                ok = False
                break
        if ok:
            return True
    return False
