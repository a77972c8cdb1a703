"""Price expectation, NPV and investment-decision tests."""

import numpy as np
import pytest

from emsim.agents import (
    BeliefSet,
    GenCo,
    InvestmentCandidate,
    PriceCurve,
    candidate_menu,
    expected_cashflow,
    invest_step,
    npv,
    predicted_price,
    sample_belief,
)
from emsim.ingest import InputError, PlantCosts, ScenarioConfig
from toys import flat_rep_year, invest_cost_table, simple_costs


def plain_scenario(**overrides):
    base = dict(
        start_year=2020, end_year=2024,
        fuel_price={"gas": {y: 20.0 for y in range(2020, 2025)}},
        carbon_price={y: 0.0 for y in range(2020, 2025)},
        fuel_map={"CCGT": "gas"},
        discount_rate=0.06,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


# ---------------------------------------------------------------------------
# price curve


def test_flat_curve():
    assert predicted_price(PriceCurve(0.0, 50.0), 12345.0) == 50.0


def test_curve_crosses_zero():
    assert predicted_price(PriceCurve(0.001, -30.0), 30000.0) == pytest.approx(0.0)


def test_curve_at_calibration_ceiling():
    # the upper corner of the calibration bounds: 300 currency at 50 GW
    assert predicted_price(PriceCurve(0.004, 100.0), 50000.0) == pytest.approx(300.0)


# ---------------------------------------------------------------------------
# belief sampling


def test_zero_sigma_reproduces_base():
    base = PriceCurve(0.002, 25.0)
    rng = np.random.default_rng(0)
    assert sample_belief(base, 0.0, 0.0, rng) == base


def test_sigma_c_only_perturbs_intercept():
    base = PriceCurve(0.002, 25.0)
    rng = np.random.default_rng(1)
    sampled = sample_belief(base, 0.0, 0.0006, rng)
    assert sampled.m == base.m
    assert sampled.c != base.c
    assert abs(sampled.c - base.c) < 0.01


def test_sample_mean_converges():
    base = PriceCurve(0.001, 40.0)
    rng = np.random.default_rng(2)
    cs = [sample_belief(base, 0.0, 1.0, rng).c for _ in range(10000)]
    # CLT: standard error is 0.01, so 0.05 is a five-sigma band
    assert abs(np.mean(cs) - 40.0) < 0.05


def test_belief_set_deterministic_and_cached():
    scenario = plain_scenario(sigma_m=0.0005, sigma_c=0.5, price_curve=(0.001, 30.0))
    a = BeliefSet(scenario, root_seed=7, genco_index=0, sim_year=2020)
    b = BeliefSet(scenario, root_seed=7, genco_index=0, sim_year=2020)
    assert a.curve(2025) == b.curve(2025)
    assert a.curve(2025) == a.curve(2025)
    # different genco or year gives an independent draw
    c = BeliefSet(scenario, root_seed=7, genco_index=1, sim_year=2020)
    assert c.curve(2025) != a.curve(2025)


def test_belief_set_uses_per_year_curves():
    scenario = plain_scenario(price_curve_by_year={2020: (0.0, 10.0), 2021: (0.0, 20.0)})
    beliefs = BeliefSet(scenario, 0, 0, 2020)
    assert beliefs.curve(2020).c == 10.0
    assert beliefs.curve(2021).c == 20.0
    assert beliefs.curve(2030).c == 20.0  # hold last beyond the table


# ---------------------------------------------------------------------------
# npv


def test_npv_zero_discount_is_plain_sum():
    assert npv([100.0, 100.0, 100.0], 0.0) == 300.0


def test_npv_break_even_identity():
    assert npv([-1000.0, 1100.0], 0.1) == pytest.approx(0.0, abs=1e-9)


def test_npv_single_discounted_flow():
    assert npv([0.0, 105.0], 0.05) == pytest.approx(100.0, abs=1e-9)


def test_npv_linearity():
    rng = np.random.default_rng(3)
    r = rng.normal(size=12)
    s = rng.normal(size=12)
    i = 0.07
    assert npv(2.5 * r + 4.0 * s, i) == pytest.approx(2.5 * npv(r, i) + 4.0 * npv(s, i), rel=1e-12)


def test_npv_matches_brute_force_oracle():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(1, 40))
        flows = rng.normal(scale=1e6, size=n)
        i = float(rng.uniform(-0.5, 0.3))
        oracle = sum(flows[t] / (1.0 + i) ** t for t in range(n))
        assert npv(flows, i) == pytest.approx(oracle, rel=1e-9)


def test_npv_invalid_rate():
    with pytest.raises(InputError):
        npv([1.0], -1.0)


# ---------------------------------------------------------------------------
# expected cashflow


def never_dispatched_candidate():
    costs = PlantCosts(
        efficiency=0.5, operating_period=3, predev_period=1, construction_period=1,
        predev_cost=100.0, construction_cost=900.0, infrastructure_cost=50.0,
        fixed_om=10.0, variable_om=2.0, insurance_cost=0.0, connection_cost=0.0,
    )
    return InvestmentCandidate("CCGT", 100.0, costs)


def test_cashflow_never_dispatched():
    # flat price 1.0 sits far below the candidate's marginal cost (42)
    scenario = plain_scenario(price_curve=(0.0, 1.0))
    cand = never_dispatched_candidate()
    beliefs = BeliefSet(scenario, 0, 0, 2020)
    flows = expected_cashflow(cand, beliefs, flat_rep_year(1000.0), scenario, 2020)
    capital = (100.0 + 900.0) * 100.0 + 50.0
    assert len(flows) == 2 + 3
    assert flows[0] == flows[1] == -capital / 2.0
    assert np.all(flows[2:] == -10.0 * 100.0)


def test_cashflow_flat_margin_hand_value():
    # flat price 50 vs marginal cost 40: a 100 MW plant earns
    # 100 * 8760 * 10 per operating year before fixed costs
    scenario = plain_scenario(price_curve=(0.0, 50.0))
    costs = PlantCosts(
        efficiency=0.5, operating_period=2, predev_period=1, construction_period=0,
        predev_cost=0.0, construction_cost=0.0, infrastructure_cost=0.0,
        fixed_om=7.0, variable_om=0.0, insurance_cost=0.0, connection_cost=0.0,
    )
    cand = InvestmentCandidate("CCGT", 100.0, costs)
    beliefs = BeliefSet(scenario, 0, 0, 2020)
    flows = expected_cashflow(cand, beliefs, flat_rep_year(1000.0), scenario, 2020)
    margin = 100.0 * 8760.0 * 10.0
    assert flows[1] == pytest.approx(margin - 7.0 * 100.0, rel=1e-12)
    assert flows[2] == pytest.approx(margin - 7.0 * 100.0, rel=1e-12)


def test_cashflow_nuclear_subsidy_adds_per_mwh():
    costs = PlantCosts(
        efficiency=1.0, operating_period=2, predev_period=1, construction_period=0,
        predev_cost=0.0, construction_cost=0.0, infrastructure_cost=0.0,
        fixed_om=0.0, variable_om=5.0, insurance_cost=0.0, connection_cost=0.0,
    )
    cand = InvestmentCandidate("Nuclear", 100.0, costs)
    rep = flat_rep_year(1000.0)
    base = plain_scenario(price_curve=(0.0, 50.0))
    with_subsidy = plain_scenario(price_curve=(0.0, 50.0), nuclear_subsidy=120.0)
    flows0 = expected_cashflow(cand, BeliefSet(base, 0, 0, 2020), rep, base, 2020)
    flows1 = expected_cashflow(cand, BeliefSet(with_subsidy, 0, 0, 2020), rep,
                               with_subsidy, 2020)
    mwh = 100.0 * 8760.0
    assert flows1[1] - flows0[1] == pytest.approx(120.0 * mwh, rel=1e-12)


def test_cashflow_intermittent_sells_capacity_times_cf():
    costs = PlantCosts(
        efficiency=1.0, operating_period=1, predev_period=1, construction_period=0,
        predev_cost=0.0, construction_cost=0.0, infrastructure_cost=0.0,
        fixed_om=0.0, variable_om=0.0, insurance_cost=0.0, connection_cost=0.0,
    )
    cand = InvestmentCandidate("PV", 100.0, costs)
    scenario = plain_scenario(price_curve=(0.0, 30.0))
    rep = flat_rep_year(demand=1000.0, solar=0.25)
    flows = expected_cashflow(cand, BeliefSet(scenario, 0, 0, 2020), rep, scenario, 2020)
    assert flows[1] == pytest.approx(100.0 * 0.25 * 8760.0 * 30.0, rel=1e-12)


def test_cashflow_commit_year_outside_scenario():
    scenario = plain_scenario()
    cand = never_dispatched_candidate()
    with pytest.raises(InputError, match="outside scenario"):
        expected_cashflow(cand, BeliefSet(scenario, 0, 0, 2019),
                          flat_rep_year(1000.0), scenario, 2019)


# ---------------------------------------------------------------------------
# invest_step


def test_candidate_menu_largest_capacity_per_type():
    menu = candidate_menu(invest_cost_table(), 2020)
    assert [c.plant_type for c in menu] == ["CCGT", "Coal", "PV"]
    assert {c.plant_type: c.capacity_mw for c in menu} == \
        {"CCGT": 1500.0, "Coal": 1500.0, "PV": 1000.0}


def test_invest_step_no_positive_npv():
    scenario = plain_scenario(price_curve=(0.0, 1.0))
    genco = GenCo("g1", 1e12)
    menu = [never_dispatched_candidate()]
    commitment, evals = invest_step(genco, 2020, menu, BeliefSet(scenario, 0, 0, 2020),
                                    flat_rep_year(1000.0), scenario)
    assert commitment is None
    assert len(evals) == 1
    assert evals[0].npv < 0
    assert genco.funds == 1e12


def test_invest_step_unaffordable_candidate():
    scenario = plain_scenario(price_curve=(0.0, 80.0))
    costs = simple_costs(efficiency=0.5, operating_period=10, predev_period=1,
                         construction_period=1, construction_cost=1000.0)
    menu = [InvestmentCandidate("CCGT", 100.0, costs)]
    genco = GenCo("g1", 10.0)  # tranche is 50,000
    commitment, evals = invest_step(genco, 2020, menu, BeliefSet(scenario, 0, 0, 2020),
                                    flat_rep_year(1000.0), scenario)
    assert commitment is None
    assert evals[0].npv > 0
    assert not evals[0].affordable
    assert genco.funds == 10.0


def test_invest_step_picks_argmax_npv():
    scenario = plain_scenario(price_curve=(0.0, 80.0))
    cheap = simple_costs(efficiency=0.5, operating_period=10, predev_period=1,
                         construction_period=1, construction_cost=100.0)
    rich = simple_costs(efficiency=0.8, operating_period=10, predev_period=1,
                        construction_period=1, construction_cost=100.0)
    menu = [InvestmentCandidate("CCGT", 100.0, cheap),
            InvestmentCandidate("Coal", 100.0, rich)]
    scenario = plain_scenario(
        price_curve=(0.0, 80.0),
        fuel_price={"gas": {y: 20.0 for y in range(2020, 2025)},
                    "coal": {y: 20.0 for y in range(2020, 2025)}},
        fuel_map={"CCGT": "gas", "Coal": "coal"},
    )
    genco = GenCo("g1", 1e9)
    commitment, evals = invest_step(genco, 2020, menu, BeliefSet(scenario, 0, 0, 2020),
                                    flat_rep_year(1000.0), scenario)
    by_type = {e.plant_type: e.npv for e in evals}
    assert by_type["Coal"] > by_type["CCGT"] > 0  # higher efficiency, same capital
    assert commitment is not None
    assert commitment.plant.plant_type == "Coal"
    assert commitment.online_year == 2022
    assert commitment.tranches_left == 1
    # first tranche deducted at commitment
    assert genco.funds == 1e9 - commitment.tranche


def test_invest_step_deterministic_across_identical_gencos():
    scenario = plain_scenario(price_curve=(0.0, 80.0))
    menu = candidate_menu(invest_cost_table(), 2020)
    scenario = plain_scenario(
        price_curve=(0.0, 80.0),
        fuel_price={"gas": {y: 20.0 for y in range(2020, 2025)},
                    "coal": {y: 10.0 for y in range(2020, 2025)}},
        fuel_map={"CCGT": "gas", "Coal": "coal"},
        emission_factor={"gas": 0.2, "coal": 0.35},
    )
    rep = flat_rep_year(1000.0, solar=0.3)
    results = []
    for gid in ("g1", "g2"):
        genco = GenCo(gid, 5e8)
        beliefs = BeliefSet(scenario, 0, 0, 2020)  # sigma = 0: all beliefs equal
        commitment, _ = invest_step(genco, 2020, menu, beliefs, rep, scenario)
        results.append(None if commitment is None else commitment.plant.plant_type)
    assert results[0] == results[1]
