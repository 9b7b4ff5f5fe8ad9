"""Blank-node-aware graph isomorphism check (backtracking with signature
pruning; intended for desk-scale graphs, not millions of triples)."""

from __future__ import annotations

from collections import defaultdict

from .terms import BlankNode, Term, Triple


def _ground(term: Term):
    return None if isinstance(term, BlankNode) else term


def _signatures(triples: list[Triple]) -> dict[str, tuple]:
    """Per blank node: multiset of grounded triple contexts it occurs in."""
    sigs: dict[str, list] = defaultdict(list)
    for t in triples:
        s_b = isinstance(t.subject, BlankNode)
        o_b = isinstance(t.object, BlankNode)
        if s_b:
            sigs[t.subject.label].append(
                ("s", t.predicate, _ground(t.object), o_b)
            )
        if o_b:
            sigs[t.object.label].append(
                ("o", t.predicate, _ground(t.subject), s_b)
            )
    return {label: tuple(sorted(ctx, key=repr)) for label, ctx in sigs.items()}


def isomorphic(a, b) -> bool:
    """True iff triple sets a and b are equal up to blank node relabelling."""
    a = set(a)
    b = set(b)
    if len(a) != len(b):
        return False

    ground_a = {t for t in a if not _has_bnode(t)}
    ground_b = {t for t in b if not _has_bnode(t)}
    if ground_a != ground_b:
        return False

    rest_a = sorted(a - ground_a, key=Triple.sort_key)
    rest_b = b - ground_b
    sig_a = _signatures(rest_a)
    sig_b = _signatures(sorted(rest_b, key=Triple.sort_key))
    if sorted(sig_a.values(), key=repr) != sorted(sig_b.values(), key=repr):
        return False

    labels_a = sorted(sig_a)
    candidates = {
        la: [lb for lb in sig_b if sig_b[lb] == sig_a[la]] for la in labels_a
    }
    # most-constrained-first ordering keeps backtracking shallow
    labels_a.sort(key=lambda la: len(candidates[la]))

    def substitute(t: Triple, mapping) -> Triple | None:
        s, o = t.subject, t.object
        if isinstance(s, BlankNode):
            if s.label not in mapping:
                return None
            s = BlankNode(mapping[s.label])
        if isinstance(o, BlankNode):
            if o.label not in mapping:
                return None
            o = BlankNode(mapping[o.label])
        return Triple(s, t.predicate, o)

    def consistent(mapping) -> bool:
        for t in rest_a:
            mapped = substitute(t, mapping)
            if mapped is not None and mapped not in rest_b:
                return False
        return True

    def backtrack(idx: int, mapping: dict, used: set) -> bool:
        if idx == len(labels_a):
            return all(substitute(t, mapping) in rest_b for t in rest_a)
        la = labels_a[idx]
        for lb in candidates[la]:
            if lb in used:
                continue
            mapping[la] = lb
            used.add(lb)
            if consistent(mapping) and backtrack(idx + 1, mapping, used):
                return True
            del mapping[la]
            used.discard(lb)
        return False

    return backtrack(0, {}, set())


def _has_bnode(t: Triple) -> bool:
    return isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode)
