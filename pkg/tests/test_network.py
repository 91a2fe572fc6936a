"""Network construction, validation, status classification, serialization."""

from __future__ import annotations

import json
from fractions import Fraction as F

import pytest

import clearflow as cf
from clearflow.errors import (
    DimensionMismatchError,
    NegativeEntryError,
    ParseError,
    SchemaError,
    SelfDebtError,
)
from conftest import statuses_of


class TestBuildNetwork:
    def test_example_total_debt_and_transposed_proportions(self, net_1a):
        assert net_1a.total_debt == (F(1), F(2), F(3), F(4), F(0))
        a, b = F(1, 3), F(1, 2)
        q_t_expected = [
            [0, 0, 0, 0, 0],
            [a, 0, 0, 1, 0],
            [0, 1 - b, 0, 0, 0],
            [0, 0, 1, 0, 0],
            [1 - a, b, 0, 0, 1],
        ]
        q_t = [[net_1a.relative[j][i] for j in range(5)] for i in range(5)]
        assert q_t == q_t_expected

    def test_zero_debt_rows_become_self_loops(self):
        net = cf.build_network([[0, 0], [0, 0]], [1, 2])
        assert net.total_debt == (F(0), F(0))
        assert net.relative == ((F(1), F(0)), (F(0), F(1)))

    def test_bank_five_gets_unit_self_loop(self, net_1a):
        assert net_1a.relative[4] == (F(0), F(0), F(0), F(0), F(1))

    def test_row_stochastic(self, net_1a):
        for row in net_1a.relative:
            assert sum(row) == 1

    def test_reconstruction(self, net_1a):
        for i in range(net_1a.n):
            if net_1a.total_debt[i] > 0:
                for j in range(net_1a.n):
                    assert net_1a.relative[i][j] * net_1a.total_debt[i] == net_1a.liabilities[i][j]

    def test_rejects_self_debt(self):
        with pytest.raises(SelfDebtError):
            cf.build_network([[1, 0], [0, 0]], [1, 1])

    def test_rejects_negative_liability(self):
        with pytest.raises(NegativeEntryError):
            cf.build_network([[0, -1], [0, 0]], [1, 1])

    def test_rejects_negative_cash(self):
        with pytest.raises(NegativeEntryError):
            cf.build_network([[0, 1], [0, 0]], [1, -1])

    def test_rejects_ragged_matrix(self):
        with pytest.raises(DimensionMismatchError):
            cf.build_network([[0, 1], [0]], [1, 1])

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cf.build_network([[0, 1], [0, 0]], [1, 1, 1])

    def test_rejects_nonfinite_float(self):
        with pytest.raises(NegativeEntryError):
            cf.build_network([[0.0, float("nan")], [0.0, 0.0]], [1.0, 1.0], mode=cf.FLOAT)


class TestInitialPartition:
    def test_example_1a_all_positive_but_five(self, net_1a):
        assert statuses_of(cf.initial_partition(net_1a)) == "ppppa"

    def test_example_1b_one_positive(self, net_1b):
        assert statuses_of(cf.initial_partition(net_1b)) == "pzzza"

    def test_all_funded_all_positive(self):
        net = cf.build_network([[0, 1], [1, 0]], [1, 1])
        assert statuses_of(cf.initial_partition(net)) == "pp"

    def test_trichotomy_over_grid(self):
        for debt in (F(0), F(1)):
            for cash in (F(0), F(1)):
                status = cf.classify_status(debt, cash, F(0))
                expected = (
                    cf.Status.ABSORBING
                    if debt == 0
                    else cf.Status.POSITIVE if cash > 0 else cf.Status.ZERO
                )
                assert status is expected


class TestSerialization:
    EXAMPLE_1C = """
    {"banks": [{"id": "1", "cash": 1}, {"id": "2", "cash": 0},
               {"id": "3", "cash": 0}, {"id": "4", "cash": 0},
               {"id": "5", "cash": 0}],
     "liabilities": [{"from": "1", "to": "5", "amount": 1},
                     {"from": "2", "to": "3", "amount": 2},
                     {"from": "3", "to": "4", "amount": 3},
                     {"from": "4", "to": "2", "amount": 4}]}
    """

    def test_parse_example_1c(self):
        net = cf.parse_network(self.EXAMPLE_1C)
        assert net.cash == (F(1), F(0), F(0), F(0), F(0))
        assert net.total_debt == (F(1), F(2), F(3), F(4), F(0))

    def test_empty_banks_is_schema_error(self):
        with pytest.raises(SchemaError):
            cf.parse_network('{"banks": [], "liabilities": []}')

    def test_bad_json_is_parse_error(self):
        with pytest.raises(ParseError):
            cf.parse_network("{not json")

    def test_unknown_bank_in_liability(self):
        with pytest.raises(SchemaError):
            cf.parse_network(
                '{"banks": [{"id": "1", "cash": 1}],'
                ' "liabilities": [{"from": "1", "to": "9", "amount": 1}]}'
            )

    def test_rational_strings_parse_exactly(self):
        net = cf.parse_network(
            '{"banks": [{"id": "x", "cash": "2/3"}, {"id": "y", "cash": "0.25"}],'
            ' "liabilities": [{"from": "x", "to": "y", "amount": "7/2"}]}'
        )
        assert net.cash == (F(2, 3), F(1, 4))
        assert net.liabilities[0][1] == F(7, 2)

    def test_round_trip_example(self, net_1a):
        again = cf.parse_network(cf.serialize_network(net_1a))
        assert again == net_1a

    def test_round_trip_csv(self, net_1b):
        banks_text, liab_text = cf.serialize_network_csv(net_1b)
        again = cf.parse_network_csv(banks_text, liab_text)
        assert again == net_1b

    def test_serialized_rationals_are_strings(self, net_1a):
        doc = json.loads(cf.serialize_network(net_1a))
        assert doc["banks"][0]["cash"] == "1"
        amounts = {(e["from"], e["to"]): e["amount"] for e in doc["liabilities"]}
        assert amounts[("1", "2")] == "1/3"

    def test_duplicate_ids_rejected(self):
        with pytest.raises(SchemaError):
            cf.parse_network(
                '{"banks": [{"id": "1", "cash": 1}, {"id": "1", "cash": 2}],'
                ' "liabilities": []}'
            )

    def test_float_mode_parse(self):
        net = cf.parse_network(
            '{"banks": [{"id": "1", "cash": 0.5}, {"id": "2", "cash": 1}],'
            ' "liabilities": [{"from": "1", "to": "2", "amount": 2}]}',
            mode=cf.FLOAT,
        )
        assert net.mode == cf.FLOAT
        assert net.cash == (0.5, 1.0)
        assert isinstance(net.zero_tol, float) and net.zero_tol > 0


class TestConvert:
    def test_convert_to_float_and_back_scales(self, net_1a):
        as_float = cf.convert_network(net_1a, cf.FLOAT)
        assert as_float.mode == cf.FLOAT
        assert as_float.total_debt == (1.0, 2.0, 3.0, 4.0, 0.0)
        assert cf.convert_network(net_1a, cf.RATIONAL) is net_1a
