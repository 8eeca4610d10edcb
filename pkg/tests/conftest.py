import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

import pytest
from rank_schemes import RankAssignment, RankMode


# Vertex 0 is an isolated spare so the chain 1 -> 2 -> 3 -> 4 keeps its natural ids.
@pytest.fixture
def chain_ranks():
    return RankAssignment.FromRanks({1: 1, 3: 2}, n=5)


@pytest.fixture
def chain_arcs():
    return [(1, 2), (2, 3), (3, 4)]


@pytest.fixture
def pair_ranks():
    return RankAssignment.FromRanks({1: 1, 2: 2}, n=3)


@pytest.fixture
def unranked():
    def make(n):
        return RankAssignment.FromRanks({}, n=n)

    return make


@pytest.fixture
def arc_ranked():
    def make(ranks, n, q=0.0, seed=0):
        assignment = RankAssignment.FromRanks(ranks, n=n, mode=RankMode.ARC_Q)
        assignment.q = q
        assignment.seed = seed
        return assignment

    return make
