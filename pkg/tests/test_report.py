"""Table emission, precision policies and parsing."""

import pytest

from bacs.errors import DomainError
from bacs.report import emit_table, fixed, format_value, odds_1dp, parse_table, pct, sig
from bacs.tables import table2


class TestFormatting:
    @pytest.mark.parametrize("x,out", [(2.375, "2.38"), (4.75, "4.75"), (86.7667, "86.8"), (0.5988, "0.599"),
                                        (18.0, "18"), (1234.5, "1235"), (0.0, "0")])
    def test_sig3(self, x, out):
        assert sig(x, 3) == out

    def test_half_away_from_zero(self):
        assert fixed(0.125, 2) == "0.13"
        assert fixed(-0.125, 2) == "-0.13"
        assert fixed(2.5, 0) == "3"

    def test_pct(self):
        assert pct(0.79536, 1) == "79.5"
        assert pct(0.648, 0) == "65"

    def test_odds_keep_thresholds(self):
        assert odds_1dp(4.75) == "4.75"
        assert odds_1dp(16.0 - 1e-12) == "16"
        assert odds_1dp(28.5714) == "28.6"

    def test_none_and_strings(self):
        assert format_value(None, "pct1") == ""
        assert format_value("r01", "sig3") == "r01"

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            format_value(1.0, "hex")


class TestEmit:
    ROWS = [dict(a=1, b=0.25, c="x"), dict(a=2, b=1 / 3, c="y")]

    def test_json_round_trip(self):
        assert parse_table(emit_table(self.ROWS, "json"), "json") == self.ROWS

    def test_csv_round_trip_as_strings(self):
        back = parse_table(emit_table(self.ROWS, "csv"), "csv")
        assert [float(r["b"]) for r in back] == [0.25, 1 / 3]

    def test_empty_rows_header_only(self):
        assert emit_table([], "csv", columns=["n", "power"]) == b"n,power\n"
        assert emit_table([], "json", columns=["n"]) == b"[]\n"

    def test_policy_applies_at_emission(self):
        out = emit_table(self.ROWS, "csv", policy={"b": "dec3"})
        assert out == b"a,b,c\n1,0.25,x\n2,0.333,y\n"
        assert self.ROWS[1]["b"] == 1 / 3

    def test_json_policy(self):
        assert parse_table(emit_table(self.ROWS, "json", policy={"b": "dec3"}))[1]["b"] == 0.333

    def test_heterogeneous_rows(self):
        with pytest.raises(DomainError):
            emit_table([dict(a=1), dict(b=2)])

    def test_unknown_format(self):
        with pytest.raises(DomainError):
            emit_table(self.ROWS, "xml")

    def test_table2_first_row(self):
        t = table2(powers=(0.80,))
        line = emit_table(t.rows, "csv", t.policy, t.columns).decode().splitlines()[1]
        assert line == "95,80,21,2,66,10,37,65,2.7,28.6,4.75,16"
