"""World lifecycle, settlement and yearly-loop tests."""

import numpy as np
import pytest

from emsim.engine import evaluate_mix, init_world, run, step_year
from emsim.ingest import InputError, PlantRegistry, ScenarioConfig
from toys import (
    flat_rep_year,
    invest_scenario,
    make_plant,
    simple_costs,
    transition_scenario,
)


def nuclear_world(demand=1500.0, years=(2020, 2022), funds=0.0):
    scenario = ScenarioConfig(
        start_year=years[0], end_year=years[1],
        carbon_price={y: 0.0 for y in range(years[0], years[1] + 1)},
    )
    plant = make_plant("n1", "g1", "Nuclear", 2000.0, 2010,
                       simple_costs(efficiency=1.0, operating_period=60, variable_om=5.0))
    registry = PlantRegistry(plants=(plant,), funds={"g1": funds})
    return init_world(scenario, registry, flat_rep_year(demand=demand),
                      _empty_cost_table(), seed=1)


def _empty_cost_table():
    from emsim.ingest import CostTable, PlantCosts
    return CostTable(rows={("Nuclear", 3300.0, 2025): PlantCosts(
        efficiency=1.0, operating_period=60, predev_period=5, construction_period=8,
        predev_cost=240000, construction_cost=4100000, infrastructure_cost=11500,
        fixed_om=72900, variable_om=5, insurance_cost=10000, connection_cost=500)})


# ---------------------------------------------------------------------------
# init


def test_init_world_all_operating():
    world = nuclear_world()
    assert world.year == 2020
    assert all(p.status == "operating" for p in world.plants)


def test_init_world_overage_plant_retired():
    scenario = ScenarioConfig(start_year=2020, end_year=2020, carbon_price={2020: 0.0})
    old = make_plant("old", "g1", "CCGT", 100.0, 1990,
                     simple_costs(operating_period=25))
    registry = PlantRegistry(plants=(old,), funds={"g1": 0.0})
    world = init_world(scenario, registry, flat_rep_year(100.0), _empty_cost_table())
    assert world.plants[0].status == "retired"


def test_init_world_empty_registry():
    scenario = ScenarioConfig(start_year=2020, end_year=2020, carbon_price={2020: 0.0})
    registry = PlantRegistry(plants=(), funds={})
    world = init_world(scenario, registry, flat_rep_year(500.0), _empty_cost_table())
    result = step_year(world)
    assert result.mix == {}
    assert result.unserved_mwh == pytest.approx(500.0 * 8760.0)


def test_init_world_unknown_retirement_plant():
    scenario = ScenarioConfig(start_year=2020, end_year=2020, carbon_price={2020: 0.0},
                              scheduled_retirements=(("ghost", 2020),))
    registry = PlantRegistry(plants=(), funds={})
    with pytest.raises(InputError, match="ghost"):
        init_world(scenario, registry, flat_rep_year(500.0), _empty_cost_table())


# ---------------------------------------------------------------------------
# step_year


def test_single_nuclear_mix():
    world = nuclear_world()
    result = step_year(world)
    assert result.mix == {"Nuclear": 1.0}
    assert result.objective_mix() == {"wind": 0.0, "nuclear": 1.0, "solar": 0.0,
                                      "CCGT": 0.0, "coal": 0.0}
    assert world.year == 2021


def test_mix_shares_sum_to_one():
    scenario, registry, rep, table = invest_scenario()
    world = init_world(scenario, registry, rep, table, seed=3)
    result = step_year(world)
    assert sum(result.mix.values()) == pytest.approx(1.0, abs=1e-9)
    assert all(v >= 0 for v in result.mix.values())


def test_scheduled_coal_retirement_cuts_coal_energy():
    years = range(2014, 2018)
    scenario = ScenarioConfig(
        start_year=2014, end_year=2017,
        fuel_price={"coal": {y: 10.0 for y in years}, "gas": {y: 20.0 for y in years}},
        carbon_price={y: 0.0 for y in years},
        fuel_map={"Coal": "coal", "CCGT": "gas"},
        scheduled_retirements=(("c1", 2016), ("c2", 2016), ("c3", 2016)),
    )
    plants = [
        make_plant(f"c{i}", "g1", "Coal", 300.0, 2010,
                   simple_costs(efficiency=0.35, operating_period=50))
        for i in (1, 2, 3)
    ]
    plants.append(make_plant("gas1", "g2", "CCGT", 2000.0, 2012,
                             simple_costs(efficiency=0.5, operating_period=50)))
    registry = PlantRegistry(plants=tuple(plants), funds={"g1": 0.0, "g2": 0.0})
    world = init_world(scenario, registry, flat_rep_year(1500.0), _empty_cost_table())
    by_year = {}
    for _ in range(4):
        result = step_year(world)
        by_year[result.year] = result.energy_mwh.get("Coal", 0.0)
    assert by_year[2016] < by_year[2015]
    assert by_year[2016] == 0.0
    assert by_year[2015] == by_year[2014]


def test_age_based_retirement_mid_run():
    scenario = ScenarioConfig(start_year=2020, end_year=2022,
                              carbon_price={y: 0.0 for y in (2020, 2021, 2022)})
    plant = make_plant("n", "g1", "Nuclear", 100.0, 2001,
                       simple_costs(efficiency=1.0, operating_period=20))
    registry = PlantRegistry(plants=(plant,), funds={"g1": 0.0})
    world = init_world(scenario, registry, flat_rep_year(50.0), _empty_cost_table())
    first = step_year(world)   # 2020: age 19, still running
    second = step_year(world)  # 2021: age 20 = OP, retires
    assert first.retired == []
    assert second.retired == ["n"]
    assert second.mix == {}


def test_clearing_counter_k8():
    rep = flat_rep_year(demand=1000.0, weights=(0.125,) * 8)
    scenario = ScenarioConfig(start_year=2020, end_year=2020, carbon_price={2020: 0.0})
    plant = make_plant("n1", "g1", "Nuclear", 2000.0, 2010,
                       simple_costs(efficiency=1.0, operating_period=60))
    registry = PlantRegistry(plants=(plant,), funds={"g1": 0.0})
    world = init_world(scenario, registry, rep, _empty_cost_table())
    result = step_year(world)
    assert result.n_clearings == 192


def test_missing_scenario_year():
    world = nuclear_world(years=(2020, 2020))
    step_year(world)
    with pytest.raises(InputError, match="2021"):
        step_year(world)


# ---------------------------------------------------------------------------
# run


def test_run_six_years():
    world = nuclear_world(years=(2013, 2018))
    sim = run(world, 6)
    assert [r.year for r in sim.years] == list(range(2013, 2019))


def test_run_zero_horizon_initial_mix_only():
    world = nuclear_world()
    sim = run(world, 0)
    assert sim.years == []
    assert sim.initial_mix == {"Nuclear": 1.0}
    assert world.year == 2020  # untouched


def test_run_deterministic_replay():
    def collect():
        scenario, registry, rep, table = invest_scenario()
        scenario = type(scenario)(**{**scenario.__dict__,
                                     "price_curve": (0.001, 40.0),
                                     "sigma_c": 0.5})
        world = init_world(scenario, registry, rep, table, seed=11)
        sim = run(world, 4)
        return [
            (r.year, sorted(r.energy_mwh.items()), sorted(r.funds.items()),
             r.prices.tolist(), [c.plant.plant_id for c in r.investments])
            for r in sim.years
        ]

    assert collect() == collect()


def test_money_conservation_ledger():
    scenario, registry, rep, table = invest_scenario()
    scenario = type(scenario)(**{**scenario.__dict__, "price_curve": (0.002, 30.0)})
    world = init_world(scenario, registry, rep, table, seed=5)
    sim = run(world, 4)
    for result in sim.years:
        for gid, s in result.settlements.items():
            # exact replay: funds_end was computed as funds_start + delta
            assert s.funds_end == s.funds_start + s.delta
            assert result.funds[gid] == s.funds_end


def test_investment_lifecycle():
    scenario, registry, rep, table = invest_scenario()
    scenario = type(scenario)(**{**scenario.__dict__, "price_curve": (0.002, 60.0)})
    world = init_world(scenario, registry, rep, table, seed=7)
    sim = run(world, 4)
    committed = [c for r in sim.years for c in r.investments]
    assert committed, "high flat price should trigger at least one investment"
    first = committed[0]
    assert first.plant.status == "operating"
    assert first.tranches_left == 0
    assert first.plant.plant_id in {pid for r in sim.years for pid in r.activated}
    # every tranche paid shows up in the settlements: total capital across
    # all companies equals the committed capital minus what is still owed
    paid = sum(s.capital_new + s.capital_existing
               for r in sim.years for s in r.settlements.values())
    expected = 0.0
    for c in committed:
        costs = c.plant.costs
        full = (costs.predev_cost + costs.construction_cost) * c.plant.capacity_mw \
            + costs.infrastructure_cost
        expected += full - c.tranche * c.tranches_left
    assert paid == pytest.approx(expected, rel=1e-12)


def test_transition_coal_to_gas():
    scenario, registry, rep = transition_scenario()
    world = init_world(scenario, registry, rep, _empty_cost_table())
    sim = run(world, 6)
    coal = [r.objective_mix()["coal"] for r in sim.years]
    gas = [r.objective_mix()["CCGT"] for r in sim.years]
    # crossover begins in the third simulated year
    assert coal[0] == coal[1] == 1.0
    for i in range(2, 6):
        assert coal[i] < coal[i - 1]
        assert gas[i] > gas[i - 1]
    assert coal[-1] == 0.0
    assert gas[-1] == 1.0


def test_evaluate_mix_is_pure():
    world = nuclear_world()
    before = world.year
    mix = evaluate_mix(world)
    assert mix == {"Nuclear": 1.0}
    assert world.year == before
    assert world.gencos["g1"].funds == 0.0
