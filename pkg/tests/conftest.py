"""Shared fixtures: the five-bank worked example in its parameter variants.

The base instance has banks 1..5 (indices 0..4), debts
b_12 = a, b_15 = 1 - a, b_25 = 2b, b_23 = 2(1 - b), b_34 = 3, b_42 = 4,
and cash (1, eps, eps, eps, 0). Different (a, b, eps) choices exercise the
unique, big-bang, and swamp regimes.
"""

from __future__ import annotations

from fractions import Fraction as F

import pytest

import clearflow as cf


def example_net(a=F(1, 3), b=F(1, 2), eps=F(1, 36), cash1=F(1), mode=cf.RATIONAL):
    liabilities = [
        [0, a, 0, 0, 1 - a],
        [0, 0, 2 * (1 - b), 0, 2 * b],
        [0, 0, 0, 3, 0],
        [0, 4, 0, 0, 0],
        [0, 0, 0, 0, 0],
    ]
    cash = [cash1, eps, eps, eps, 0]
    return cf.build_network(liabilities, cash, mode=mode)


def with_cash(net, cash):
    """Same liabilities, different cash vector."""
    return cf.build_network(net.liabilities, cash, mode=net.mode, ids=net.ids)


def statuses_of(partition):
    """Compact view: 'p', 'z', 'a' per bank."""
    return "".join(s.value[0] for s in partition)


@pytest.fixture
def net_1a():
    return example_net()


@pytest.fixture
def net_1a_boundary():
    return example_net(eps=F(1, 18))


@pytest.fixture
def net_1b():
    return example_net(a=F(2, 3), eps=0)


@pytest.fixture
def net_1c():
    return example_net(a=0, b=0, eps=0)


@pytest.fixture
def net_1c_variant():
    # same swamp {2,3,4} but bank 4 owes 2 to each of banks 2 and 3
    liabilities = [
        [0, 0, 0, 0, 1],
        [0, 0, 2, 0, 0],
        [0, 0, 0, 3, 0],
        [0, 2, 2, 0, 0],
        [0, 0, 0, 0, 0],
    ]
    return cf.build_network(liabilities, [1, 0, 0, 0, 0])
