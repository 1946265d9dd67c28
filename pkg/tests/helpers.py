"""Shared test oracles, kept deliberately independent of the library's
satisfiability path: policies are evaluated by direct boolean recursion."""

from aprabe.lsss import And, Leaf, Or


def brute_eval(formula, present):
    if isinstance(formula, Leaf):
        return formula.vector in present
    if isinstance(formula, And):
        return brute_eval(formula.left, present) and brute_eval(formula.right, present)
    return brute_eval(formula.left, present) or brute_eval(formula.right, present)


def all_shapes(leaf_count):
    """Every binary AND/OR tree shape with the given number of leaves."""
    if leaf_count == 1:
        yield ("leaf",)
        return
    for split in range(1, leaf_count):
        for left in all_shapes(split):
            for right in all_shapes(leaf_count - split):
                for gate in ("AND", "OR"):
                    yield (gate, left, right)


def instantiate(shape, vector_iter):
    if shape == ("leaf",):
        return Leaf(next(vector_iter))
    gate, left, right = shape
    cls = And if gate == "AND" else Or
    return cls(instantiate(left, vector_iter), instantiate(right, vector_iter))


def random_formula(rng, vectors):
    nodes = [Leaf(v) for v in vectors]
    while len(nodes) > 1:
        i = rng.randrange(len(nodes) - 1)
        cls = And if rng.random() < 0.5 else Or
        nodes[i : i + 2] = [cls(nodes[i], nodes[i + 1])]
    return nodes[0]
