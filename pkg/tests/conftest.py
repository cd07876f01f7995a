"""Shared fixtures: the bundled root presentation and the records derived
from it that several test modules (and all acceptance criteria) reuse.

Everything expensive is session-scoped so the descent below the index-288
subgroup happens once per test run.
"""

import pytest

from fptower import (bundled_presentation, todd_coxeter, conjugate, concat,
                     commutator, subgroup_record, prime_index_normal_subgroups,
                     descend_chain, find_epi_to_triangle, order3_quadruples,
                     order3_generation_certificate, TietzeBudget)

U = (1,)
W = (2,)


@pytest.fixture(scope="session")
def gbar():
    return bundled_presentation("gamma-bar")


@pytest.fixture(scope="session")
def budget():
    return TietzeBudget(time_limit=60)


@pytest.fixture(scope="session")
def g1(gbar, budget):
    """The index-288 subgroup generated by three conjugates of w."""
    gens = [conjugate(W, concat(U, W)),
            conjugate(W, conjugate(W, U)),
            conjugate(W, commutator(U, (-2,)))]
    table = todd_coxeter(gbar, gens)
    return subgroup_record("G1", gbar, table, budget=budget)


@pytest.fixture(scope="session")
def g1_kernels(g1, budget):
    return prime_index_normal_subgroups(g1, 3, budget)


@pytest.fixture(scope="session")
def h1(g1_kernels):
    (rec,) = [k for k in g1_kernels if k.invariants.brackets() == [0, 0]]
    return rec


@pytest.fixture(scope="session")
def g2(g1, budget):
    """The [3,3] kernel of G1 containing the designated witness w^(u*w)."""
    witness = g1.rewrite_from_parent(conjugate(W, concat(U, W)))
    result = descend_chain(g1, 1, witnesses=[witness], budget=budget)
    assert result.steps[0].witnessed
    rec = result.steps[0].record
    rec.label = "G2"
    return rec


@pytest.fixture(scope="session")
def epi_images(g1):
    images = find_epi_to_triangle(g1.pres)
    assert images is not None, "no certified epimorphism found"
    return images


@pytest.fixture(scope="session")
def quad(g1, g2, epi_images, budget):
    """First order-3 quadruple whose triple provably normally generates G2."""
    for q in order3_quadruples(g1, epi_images, g2):
        if not q.normally_generates:
            continue
        if order3_generation_certificate(g2, g1, list(q.words()[:3]),
                                         budget=budget):
            return q
    pytest.fail("no certified order-3 quadruple found")


@pytest.fixture(scope="session")
def chain3(g1, g2, quad, budget):
    """Records [G1, G2, G3, G4]: the chain to required depth 3."""
    wits = [g2.rewrite_from_parent(x) for x in quad.words()[:3]]
    result = descend_chain(g2, 2, witnesses=wits, budget=budget)
    assert result.complete, result.stop_reason
    records = [g1, g2]
    for i, step in enumerate(result.steps):
        step.record.label = f"G{i + 3}"
        records.append(step.record)
    return records
