import random

from densemodal import And, Atom, Box, FALSUM, MOD_A, Not


def random_formula(rng: random.Random, budget: int, names, modalities=(MOD_A,), falsum_rate=0.08):
    """Random core AST with at most budget nodes; deterministic under a seeded rng."""
    if budget <= 1 or rng.random() < 0.35:
        if rng.random() < falsum_rate:
            return FALSUM
        return Atom(rng.choice(names))
    kinds = ["not", "box"] if budget < 3 else ["not", "not", "box", "and", "and"]
    kind = rng.choice(kinds)
    if kind == "not":
        return Not(random_formula(rng, budget - 1, names, modalities, falsum_rate))
    if kind == "box":
        return Box(
            rng.choice(modalities),
            random_formula(rng, budget - 1, names, modalities, falsum_rate),
        )
    split = rng.randint(1, budget - 2)
    return And(
        random_formula(rng, split, names, modalities, falsum_rate),
        random_formula(rng, budget - 1 - split, names, modalities, falsum_rate),
    )
