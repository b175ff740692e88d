"""Checking a composition gives the interleaving of the halves' results."""

import random

import pytest

from most.check import check_uniform
from most.syntax.ast import Par
from most.trace import interleave_sets

import gen

SEEDS = range(20)


def compose_case(seed):
    a, A, P, c, C, Q = gen.cut_pair(random.Random(seed))
    T1 = check_uniform((), (), P, (), (a, A)).traces
    T2 = check_uniform((), (), Q, ((a, A),), (c, C)).traces
    T = check_uniform((), ((a, A),), Par(a, P, Q), (), (c, C)).traces
    return T, interleave_sets(T1, T2)


@pytest.mark.parametrize("seed", SEEDS)
def test_composition_interleaves_halves(seed):
    T, expected = compose_case(seed)
    assert T and T == expected
