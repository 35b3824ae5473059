import csv
import math

import pytest

from shorsim.distributions import (
    analytic_joint_probability,
    conditional,
    marginal,
    measurement_distribution,
    multi_register_audit,
    shor_bound_report,
    signed_residue,
)
from shorsim.errors import ConditioningError, NormalizationError, RangeError
from shorsim.numtheory import euler_phi, mod_pow, multiplicative_order
from shorsim.pipeline import run_pipeline
from shorsim.registers import SPARSE, ProblemInstance, StateVector

INST_15_7 = ProblemInstance.create(15, 7)
INST_21_2 = ProblemInstance.create(21, 2)


@pytest.fixture(scope="module")
def dist_15_7():
    return measurement_distribution(run_pipeline(INST_15_7, ell=1))


@pytest.fixture(scope="module")
def dist_15_7_ell2():
    return measurement_distribution(run_pipeline(INST_15_7, ell=2))


@pytest.fixture(scope="module")
def dist_21_2():
    return measurement_distribution(run_pipeline(INST_21_2, ell=1))


class TestMeasurementDistribution:
    def test_known_probabilities(self, dist_15_7):
        assert dist_15_7.probability((64, 1)) == pytest.approx(1 / 16, abs=1e-12)
        # alternating geometric sum cancels exactly
        assert dist_15_7.probability((32, 1)) <= 1e-20
        assert dist_15_7.total() == pytest.approx(1.0, abs=1e-12)

    def test_probabilities_are_valid(self, dist_21_2):
        assert dist_21_2.total() == pytest.approx(1.0, abs=1e-12)
        assert all(0.0 <= p <= 1.0 for p in dist_21_2.entries.values())

    def test_support_is_powers_of_base(self, dist_21_2):
        residues = {mod_pow(2, k, 21) for k in range(multiplicative_order(2, 21))}
        assert {y for (_, y) in dist_21_2.entries} <= residues

    def test_rejects_unnormalized_state(self):
        layout = INST_15_7.layout(1)
        bad = StateVector(layout, SPARSE, {0: 0.5 + 0j})
        with pytest.raises(NormalizationError):
            measurement_distribution(bad)


class TestAnalyticJointProbability:
    def test_examples(self):
        r = 4
        # all 64 phases equal 1
        assert analytic_joint_probability(INST_15_7, r, 64, 0) == pytest.approx(
            1 / 16, abs=1e-15
        )
        # the b-sum telescopes to zero
        assert analytic_joint_probability(INST_15_7, r, 32, 0) == pytest.approx(
            0.0, abs=1e-30
        )
        # zero frequency sums 64 unit terms
        assert analytic_joint_probability(INST_15_7, r, 0, 3) == pytest.approx(
            1 / 16, abs=1e-15
        )

    def test_range_errors(self):
        with pytest.raises(RangeError):
            analytic_joint_probability(INST_15_7, 4, 256, 0)
        with pytest.raises(RangeError):
            analytic_joint_probability(INST_15_7, 4, 0, 4)

    @pytest.mark.parametrize("inst", [INST_15_7, INST_21_2])
    def test_matches_simulation_everywhere(self, inst, dist_15_7, dist_21_2):
        dist = dist_15_7 if inst is INST_15_7 else dist_21_2
        r = multiplicative_order(inst.x, inst.n)
        worst = 0.0
        for c in range(inst.q):
            for k in range(r):
                y = mod_pow(inst.x, k, inst.n)
                diff = abs(
                    dist.probability((c, y))
                    - analytic_joint_probability(inst, r, c, k)
                )
                worst = max(worst, diff)
        assert worst <= 1e-12

    def test_total_mass_is_one(self):
        for inst in (INST_15_7, INST_21_2):
            r = multiplicative_order(inst.x, inst.n)
            total = sum(
                analytic_joint_probability(inst, r, c, k)
                for c in range(inst.q)
                for k in range(r)
            )
            assert total == pytest.approx(1.0, abs=1e-12)


class TestMarginalConditional:
    def test_control_marginal(self, dist_15_7):
        m = marginal(dist_15_7, (1,))
        assert m.probability((64,)) == pytest.approx(1 / 4, abs=1e-12)

    def test_keep_everything_is_identity(self, dist_15_7):
        m = marginal(dist_15_7, (1, 2))
        assert m.entries == dist_15_7.entries

    def test_function_marginal_uniform(self, dist_15_7):
        m = marginal(dist_15_7, (2,))
        for k in range(4):
            y = mod_pow(7, k, 15)
            assert m.probability((y,)) == pytest.approx(1 / 4, abs=1e-12)

    def test_empty_keep_rejected(self, dist_15_7):
        with pytest.raises(RangeError):
            marginal(dist_15_7, ())

    def test_perfect_correlation_under_conditioning(self, dist_15_7_ell2):
        cond = conditional(dist_15_7_ell2, {2: 1})
        second = marginal(cond, (3,))
        assert second.probability((1,)) == pytest.approx(1.0, abs=1e-12)
        assert second.probability((7,)) == 0.0

    def test_full_outcome_conditioning_is_point_mass(self, dist_15_7):
        cond = conditional(dist_15_7, {1: 64, 2: 1})
        assert cond.entries == {(64, 1): 1.0}

    def test_zero_probability_event_rejected(self, dist_15_7):
        with pytest.raises(ConditioningError):
            conditional(dist_15_7, {1: 3})

    def test_chain_rule(self, dist_21_2):
        # P(A | B) * P(B) = P(A and B), within accumulation tolerance
        given_mass = marginal(dist_21_2, (2,)).probability((1,))
        cond = conditional(dist_21_2, {2: 1})
        for outcome, p_cond in cond.entries.items():
            assert p_cond * given_mass == pytest.approx(
                dist_21_2.probability(outcome), abs=1e-14
            )


class TestSignedResidue:
    def test_examples(self):
        assert signed_residue(256, 256) == 0
        assert signed_residue(252, 256) == -4
        assert signed_residue(128, 256) == 128  # boundary maps to +q/2

    def test_range_and_congruence(self):
        q = 64
        for v in range(-3 * q, 3 * q):
            m = signed_residue(v, q)
            assert -q / 2 < m <= q / 2
            assert (v - m) % q == 0


class TestBoundReport:
    def test_n15_rows(self):
        report = shor_bound_report(INST_15_7)
        assert report.r == 4
        assert [row.c for row in report.rows] == [0, 64, 128, 192]
        assert report.good_c_count == report.r
        for row in report.rows:
            assert row.p_min == pytest.approx(1 / 16, abs=1e-12)
            assert row.p_min >= 4 / (math.pi**2 * 16) - 1e-12
        assert report.all_clear

    def test_n15_success_mass(self):
        report = shor_bound_report(INST_15_7)
        coprime_rows = [row for row in report.rows if row.gcd_d_r == 1]
        assert [row.c for row in coprime_rows] == [64, 192]
        assert report.success_mass == pytest.approx(0.5, abs=1e-12)
        assert report.success_mass >= report.success_bound_phi_over_3r  # 1/6
        assert report.success_mass >= report.success_bound_phi_over_3r2  # 1/24

    def test_n21_rows(self):
        report = shor_bound_report(INST_21_2)
        assert report.r == 6
        assert report.good_c_count == 6
        assert sorted(row.d for row in report.rows) == [0, 1, 2, 3, 4, 5]
        floor = 1 / (3 * 36)
        for row in report.rows:
            assert row.p_min > floor
        assert report.all_clear

    def test_phi_matches_oracle(self):
        for inst in (INST_15_7, INST_21_2):
            report = shor_bound_report(inst)
            assert report.phi_r == euler_phi(report.r)
            assert report.coprime_good_c_count == report.phi_r

    def test_row_count_equals_order(self):
        for n, x in [(15, 2), (15, 4), (21, 5), (33, 2), (35, 2), (39, 2)]:
            report = shor_bound_report(ProblemInstance.create(n, x))
            assert report.good_c_count == report.r

    def test_json_round_trip_fields(self):
        doc = shor_bound_report(INST_15_7).to_json_dict()
        assert doc["schema_version"] == 1
        assert len(doc["rows"]) == doc["good_c_count"]
        assert all("margin_vs_4_over_pi2_r2" in row for row in doc["rows"])


class TestUniformSupportWhenOrderDivides:
    @pytest.mark.parametrize("x", [2, 7, 8, 13])
    def test_equal_split(self, x):
        inst = ProblemInstance.create(15, x)
        r = multiplicative_order(x, 15)
        dist = measurement_distribution(run_pipeline(inst, ell=1))
        report = shor_bound_report(inst)
        good = [row.c for row in report.rows]
        control = marginal(dist, (1,))
        for c in good:
            assert control.probability((c,)) == pytest.approx(1 / r, abs=1e-12)
            for k in range(r):
                y = mod_pow(x, k, 15)
                assert dist.probability((c, y)) == pytest.approx(
                    1 / r**2, abs=1e-12
                )
        assert len(dist.entries) == r * r


class TestAudit:
    @pytest.mark.parametrize("inst,ell", [(INST_15_7, 2), (INST_15_7, 3), (INST_21_2, 2)])
    def test_claims(self, inst, ell):
        report = multi_register_audit(inst, ell=ell)
        assert report.equal_outcome_discrepancy <= 1e-12
        assert report.unequal_register_mass <= 1e-12
        assert report.passed
        assert report.joint_probabilities_match
        assert report.registers_perfectly_correlated

    def test_conditional_alternative_scales_by_order(self):
        # With a uniform function-register marginal the conditional reading is
        # exactly r times the joint one.
        report = multi_register_audit(INST_15_7, ell=2)
        assert report.modal_conditional_probability == pytest.approx(
            report.r * report.modal_joint_probability, abs=1e-12
        )

    def test_requires_two_registers(self):
        with pytest.raises(ValueError):
            multi_register_audit(INST_15_7, ell=1)

    def test_json_fields(self):
        doc = multi_register_audit(INST_15_7, ell=2).to_json_dict()
        assert doc["schema_version"] == 1
        assert doc["joint_probabilities_match"] is True
        assert doc["registers_perfectly_correlated"] is True
        assert "verdict" in doc


class TestCsvExport:
    def test_seventeen_digit_round_trip(self, tmp_path, dist_21_2):
        path = tmp_path / "dist.csv"
        dist_21_2.write_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["c", "y1", "probability"]
        parsed = {
            (int(c), int(y)): float(p) for c, y, p in rows[1:]
        }
        assert len(parsed) == len(dist_21_2.entries)
        for outcome, prob in dist_21_2.entries.items():
            assert parsed[outcome] == prob  # %.17g round-trips doubles exactly
