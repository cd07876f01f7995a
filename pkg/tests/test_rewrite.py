"""Subgroup rewriting and Tietze simplification."""

import pytest

from fptower import (parse_presentation, todd_coxeter, quotient_order,
                     abelian_invariants, schreier_transversal,
                     reidemeister_schreier, tietze_simplify,
                     simplify_presentation, TietzeBudget,
                     bundled_presentation, free_reduce)


def _subgroup(text, gens_text):
    pres = parse_presentation(text)
    gens = [pres.word(g) for g in gens_text]
    table = todd_coxeter(pres, gens)
    return pres, table, reidemeister_schreier(pres, table)


def test_transversal_prefix_closed():
    pres = parse_presentation("<x, y | x^2, y^3, (x*y)^4>")
    table = todd_coxeter(pres, [pres.word("x")])
    reps = schreier_transversal(table)
    assert len(reps) == table.index
    assert reps[0] == ()
    rep_set = set(reps)
    for w in reps:
        for i in range(len(w)):
            assert w[:i] in rep_set        # every prefix is a representative
    # each representative lands in its own coset
    assert sorted(table.trace(w, 1) for w in reps) == list(
        range(1, table.index + 1))


def test_schreier_generator_count():
    """A subgroup of index n in a rank-r free group has n*(r-1)+1 Schreier
    generators after removing the tree-trivial ones."""
    cases = [
        ("<x, y | x^2, y^3, (x*y)^4>", ["x"], 12),
        ("<x, y | x^2, y^3, (x*y)^4>", ["y"], 8),
        ("<x, y | x^2, y^2, (x*y)^3>", ["x*y"], 2),
    ]
    for text, gens, index in cases:
        _, table, sp = _subgroup(text, gens)
        assert table.index == index
        assert sp.nletters == index * (2 - 1) + 1
    gbar = bundled_presentation("gamma-bar")
    gens = [gbar.word("w^(u*w)"), gbar.word("w^(w^u)"), gbar.word("w^((u,w^-1))")]
    table = todd_coxeter(gbar, gens)
    sp = reidemeister_schreier(gbar, table)
    assert sp.nletters == 288 * (2 - 1) + 1 == 289
    assert sp.raw_relator_count == len(gbar.relators) * 288


def test_subgroup_presentation_defines_right_group():
    """The rewritten presentation has the subgroup's order (finite cases)."""
    cases = [
        # (ambient, subgroup gens, ambient order, index)
        ("<x, y | x^2, y^3, (x*y)^4>", ["y"], 24, 8),
        ("<x, y | x^2, y^2, (x*y)^6>", ["x*y"], 12, 2),
        ("<x, y | x^3, y^3, (x, y)>", ["x"], 9, 3),
    ]
    for text, gens, order, index in cases:
        _, table, sp = _subgroup(text, gens)
        assert table.index == index
        assert quotient_order(sp.presentation) == order // index


def test_rewrite_and_expand_round_trip():
    pres, table, sp = _subgroup("<x, y | x^2, y^3, (x*y)^4>", ["y"])
    # generator words expand to ambient words that lie in the subgroup
    for w in sp.generator_words:
        assert table.contains(w)
    # rewrite of an ambient subgroup element expands back to an ambient
    # word acting identically on the coset table (same group element
    # modulo the subgroup's core, which is all a table can see)
    full = todd_coxeter(pres, ())           # regular representation
    for text in ["y", "y^2", "x*y*x", "x*y^-1*x*y*x*y*x"]:
        w = pres.word(text)
        if not table.contains(w):
            continue
        back = sp.expand_ambient(sp.rewrite(w))
        assert all(full.trace(back, c) == full.trace(w, c)
                   for c in range(1, full.index + 1))


def test_rewrite_rejects_outsiders():
    pres, table, sp = _subgroup("<x, y | x^2, y^3, (x*y)^4>", ["y"])
    with pytest.raises(ValueError):
        sp.rewrite(pres.word("x"))


def test_tietze_preserves_abelian_invariants_and_order():
    for text, gens in [("<x, y | x^2, y^3, (x*y)^4>", ["y"]),
                       ("<x, y | x^2, y^2, (x*y)^6>", ["x*y"]),
                       ("<x, y | x^3, y^3, (x, y)>", ["x"])]:
        _, table, sp = _subgroup(text, gens)
        before_inv = abelian_invariants(sp.presentation)
        before_order = quotient_order(sp.presentation)
        simp = tietze_simplify(sp)
        assert abelian_invariants(simp.presentation) == before_inv
        assert quotient_order(simp.presentation) == before_order
        # simplification never grows the presentation
        assert len(simp.presentation.names) <= sp.nletters


def test_tietze_eliminates_redundant_generator():
    pres = parse_presentation("<x, y, z | z*y^-1*x^-1, x^3, y^3, (x*y)^3>")
    simp = simplify_presentation(pres)
    assert len(simp.presentation.names) <= 2
    # the eliminated letter still rewrites through to_current
    z_now = simp.to_current(pres.word("z"))
    xy_now = free_reduce(simp.to_current(pres.word("x*y")))
    assert free_reduce(z_now) == xy_now


def test_tietze_budget_growth_cap():
    gbar = bundled_presentation("gamma-bar")
    gens = [gbar.word("w^(u*w)"), gbar.word("w^(w^u)"), gbar.word("w^((u,w^-1))")]
    sp = reidemeister_schreier(gbar, todd_coxeter(gbar, gens))
    cap = 2 * sp.total_length()
    simp = tietze_simplify(sp, TietzeBudget(max_total_length=cap))
    assert simp.total_length() <= cap
    assert str(abelian_invariants(simp.presentation)) == "[3,3]"


def test_budget_validation():
    with pytest.raises(ValueError):
        TietzeBudget(max_passes=0)
    with pytest.raises(ValueError):
        TietzeBudget(time_limit=0)


def test_save_formats(tmp_path):
    _, _, sp = _subgroup("<x, y | x^2, y^3, (x*y)^4>", ["y"])
    simp = tietze_simplify(sp)
    ppath = tmp_path / "sub.pres"
    mpath = tmp_path / "sub.map"
    simp.save(ppath, mpath)
    reloaded = parse_presentation(ppath.read_text())
    assert reloaded == simp.presentation
    assert mpath.read_text().count("=") == len(simp.presentation.names)
