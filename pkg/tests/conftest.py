"""Shared fixtures: canned instances, a seeded instance generator, and a
decode-certification helper every solution-producing test funnels through."""

import random
from pathlib import Path

import pytest

from gicast import GicInstance, SchemeSolution, load_instance, simulate_decode

FIXTURES = Path(__file__).parent / "fixtures"


def certify(inst: GicInstance, sol: SchemeSolution) -> SchemeSolution:
    """Assert the solution actually lets every receiver decode; returns it
    so call sites can chain.  Keeps the no-unverified-solutions rule in one
    place."""
    report = simulate_decode(inst, sol)
    assert report.passed, f"{sol.scheme}: {report.first_failure}"
    return sol


@pytest.fixture(scope="session")
def ex1() -> GicInstance:
    return load_instance((FIXTURES / "example1.gic").read_text())


@pytest.fixture(scope="session")
def ex3() -> GicInstance:
    return load_instance((FIXTURES / "example3.gic").read_text())


def random_instance(rng: random.Random, max_m: int = 4, max_users: int = 7) -> GicInstance:
    """Small random well-formed instance: every packet demanded at least
    once, side info an arbitrary subset of the other packets."""
    m = rng.randint(1, max_m)
    n_users = rng.randint(m, max_users)
    demands = list(range(1, m + 1)) + [rng.randint(1, m) for _ in range(n_users - m)]
    rng.shuffle(demands)
    copies: dict[int, int] = {}
    users = []
    for i in demands:
        copies[i] = copies.get(i, 0) + 1
        side = {p for p in range(1, m + 1) if p != i and rng.random() < 0.5}
        users.append(((i, copies[i]), side))
    return GicInstance.make(m, users)
