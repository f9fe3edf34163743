"""Splitting a composite modulus into prime parts and back.

A rule over Z/6 with unit coefficients is conjugate to the pair of its mod-2
and mod-3 components: splitting commutes with the dynamics site by site, and
measures project to the components (for the uniform measure, onto uniform
components whose product joining reconstructs it).
"""

from modshift import (
    LocalRule,
    ModuleSpec,
    WindowSpec,
    ZmodRing,
    component_rule,
    conjugacy_check,
    constant_config,
    decompose_ring,
    merge_config,
    merge_product_bernoulli,
    project_measure,
    split_config,
    uniform_bernoulli,
)


def main():
    ring = ZmodRing(6)
    deco = decompose_ring(ring)
    print("zmod:6 splits into:", [r.descriptor() for r in deco.component_rings])
    print("5 maps to", deco.forward(5), "and back to", deco.inverse(deco.forward(5)))

    module = ModuleSpec(ring, 1)
    rule = LocalRule(module, (1, 0), ((0,), (1,)), (1, 5))
    print("\nrule coefficients (1, 5) split into:",
          component_rule(rule, deco, 0).coeffs, "and",
          component_rule(rule, deco, 1).coeffs)
    res = conjugacy_check(rule, deco, trials=100, torus_extents=(32,), seed=3)
    print("split(rule(c)) == component rules(split(c)) on 100 random tori:", res.ok)

    window = WindowSpec((1, 0), (0,), (8,))
    c = constant_config(module, window, 5)
    parts = split_config(c, deco)
    print("\nconstant-5 configuration splits into constants",
          int(parts[0].values.ravel()[0]), "and", int(parts[1].values.ravel()[0]))
    print("merge restores it:", merge_config(parts, deco) == c)

    mu = uniform_bernoulli(module, window, seed=4)
    comps = [project_measure(mu, deco, j) for j in range(deco.n_components)]
    print("\nuniform Z/6 projects to site distributions:",
          [tuple(str(p) for p in m.probs) for m in comps])
    rebuilt = merge_product_bernoulli(comps, deco)
    print("product joining reconstructs the uniform measure:",
          rebuilt.probs == mu.probs)


if __name__ == "__main__":
    main()
