"""Simulation world and the yearly loop.

Each simulated year retires plants, dispatches every weighted
representative day, settles company accounts, lets companies invest and
brings finished construction online. Runs are deterministic for a fixed
seed.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field

import numpy as np

from .agents import BeliefSet, Commitment, GenCo, candidate_menu, invest_step
from .ingest import CostTable, InputError, PlantRegistry, PowerPlant, ScenarioConfig
from .market import dispatch_year, srmc
from .repdays import RepresentativeYear

log = logging.getLogger(__name__)

# Grouping of plant types into the electricity-mix buckets used by the
# calibration objective (offshore and onshore both count as wind).
OBJECTIVE_BUCKETS = {
    "Offshore": "wind",
    "Onshore": "wind",
    "Nuclear": "nuclear",
    "PV": "solar",
    "CCGT": "CCGT",
    "Coal": "coal",
}
OBJECTIVE_TYPES = ("wind", "nuclear", "solar", "CCGT", "coal")


@dataclass
class Settlement:
    """One company's money movements in one year; funds_end is computed
    exactly as funds_start + delta so the ledger can be replayed."""

    funds_start: float
    market_revenue: float = 0.0
    subsidy: float = 0.0
    variable_cost: float = 0.0
    fixed_cost: float = 0.0
    capital_existing: float = 0.0
    capital_new: float = 0.0
    funds_end: float = 0.0

    @property
    def delta(self) -> float:
        return (self.market_revenue + self.subsidy - self.variable_cost
                - self.fixed_cost - self.capital_existing - self.capital_new)


@dataclass
class YearResult:
    year: int
    energy_mwh: dict[str, float]        # plant type -> MWh served
    mix: dict[str, float]               # plant type -> share of served energy
    unserved_mwh: float
    n_clearings: int
    prices: np.ndarray                  # clearing price per representative hour
    price_hours: np.ndarray             # duration of each price sample
    settlements: dict[str, Settlement]  # genco id -> money movements
    funds: dict[str, float]             # genco id -> funds at year end
    investments: list = field(default_factory=list)      # committed this year
    investment_log: list = field(default_factory=list)   # every candidate evaluated
    retired: list[str] = field(default_factory=list)
    activated: list[str] = field(default_factory=list)
    # populated only when World.keep_dispatch is set: per cluster, the 24
    # clearings plus the bid price of every operating plant
    dispatch_detail: list | None = None

    def objective_mix(self) -> dict[str, float]:
        """Served-energy shares grouped into the five objective buckets."""
        out = {t: 0.0 for t in OBJECTIVE_TYPES}
        for ptype, share in self.mix.items():
            bucket = OBJECTIVE_BUCKETS.get(ptype)
            if bucket is not None:
                out[bucket] += share
        return out


@dataclass
class SimulationResult:
    years: list[YearResult]
    initial_mix: dict[str, float] | None = None

    def mix_trajectory(self) -> dict[int, dict[str, float]]:
        return {yr.year: yr.objective_mix() for yr in self.years}


@dataclass
class World:
    year: int
    scenario: ScenarioConfig
    rep_year: RepresentativeYear
    cost_table: CostTable
    plants: list[PowerPlant]
    gencos: dict[str, GenCo]
    commitments: list[Commitment] = field(default_factory=list)
    seed: int = 0
    keep_dispatch: bool = False  # retain per-hour clearings on YearResults

    def operating_plants(self) -> list[PowerPlant]:
        return [p for p in self.plants if p.status == "operating"]

    def genco_order(self) -> list[str]:
        return sorted(self.gencos)


def init_world(scenario: ScenarioConfig, registry: PlantRegistry,
               rep_year: RepresentativeYear, cost_table: CostTable,
               seed: int | None = None) -> World:
    """Build a world at the scenario's start year.

    Registry plants start operating except those already past their
    operating period, which retire immediately. The registry itself is
    never mutated: the world works on copies.
    """
    plants = [copy.copy(p) for p in registry.plants]
    year = scenario.start_year
    for plant in plants:
        plant.status = "operating"
        if year - plant.construction_year >= plant.costs.operating_period:
            plant.status = "retired"
            log.info("plant %s already past operating period at init; retired", plant.plant_id)
    gencos = {owner: GenCo(owner, funds) for owner, funds in registry.funds.items()}
    for pid, _ in scenario.scheduled_retirements:
        if pid not in {p.plant_id for p in plants}:
            raise InputError(f"scheduled retirement names unknown plant '{pid}'")
    return World(
        year=year,
        scenario=scenario,
        rep_year=rep_year,
        cost_table=cost_table,
        plants=plants,
        gencos=gencos,
        seed=scenario.rng_seed if seed is None else seed,
    )


def _dispatch_summary(world: World, year: int):
    """Dispatch all representative days; returns per-plant annual energy
    and revenue plus aggregate price/unserved records."""
    scenario = world.scenario
    operating = world.operating_plants()
    costs = {p.plant_id: srmc(p, scenario, year) for p in operating}
    days = dispatch_year(
        operating, costs, world.rep_year, scenario.price_cap,
        scenario.nuclear_subsidy, scenario.demand_scale_at(year),
    )
    energy = {p.plant_id: 0.0 for p in operating}
    revenue = {p.plant_id: 0.0 for p in operating}
    subsidy = {p.plant_id: 0.0 for p in operating}
    unserved = 0.0
    prices: list[float] = []
    hours: list[float] = []
    n_clearings = 0
    for day in days:
        for pid in energy:
            energy[pid] += day.energy_mwh[pid]
            revenue[pid] += day.market_revenue[pid]
            subsidy[pid] += day.subsidy[pid]
        unserved += day.unserved_mwh
        for clearing in day.clearings:
            prices.append(clearing.clearing_price)
            hours.append(day.weight * 365.0)
        n_clearings += len(day.clearings)
    return operating, costs, energy, revenue, subsidy, unserved, prices, hours, \
        n_clearings, days


def step_year(world: World) -> YearResult:
    """Advance the world by one year.

    Phases: retire (scheduled and aged-out) -> dispatch representative
    days -> settle revenues and costs -> invest (except in the final
    scenario year) -> activate finished construction -> advance the
    calendar.
    """
    year = world.year
    scenario = world.scenario
    if not scenario.start_year <= year <= scenario.end_year:
        raise InputError(f"scenario does not cover year {year}")

    # 1. retirements
    retired = []
    scheduled = {pid for pid, y in scenario.scheduled_retirements if y == year}
    for plant in world.plants:
        if plant.status != "operating":
            continue
        if plant.plant_id in scheduled or year - plant.construction_year >= plant.costs.operating_period:
            plant.status = "retired"
            retired.append(plant.plant_id)

    # 2. dispatch
    operating, costs, energy, revenue, subsidy, unserved, prices, hours, \
        n_clearings, days = _dispatch_summary(world, year)
    dispatch_detail = None
    if world.keep_dispatch:
        dispatch_detail = [
            {"cluster": c, "weight": day.weight, "clearings": day.clearings,
             "bid_prices": costs}
            for c, day in enumerate(days)
        ]

    # 3. settle
    settlements: dict[str, Settlement] = {}
    for gid in world.genco_order():
        genco = world.gencos[gid]
        s = Settlement(funds_start=genco.funds)
        for plant in operating:
            if plant.owner_id != gid:
                continue
            pid = plant.plant_id
            s.market_revenue += revenue[pid]
            s.subsidy += subsidy[pid]
            s.variable_cost += energy[pid] * costs[pid]
            s.fixed_cost += plant.costs.fixed_om * plant.capacity_mw
        for commitment in world.commitments:
            if commitment.plant.owner_id != gid or commitment.tranches_left <= 0:
                continue
            s.capital_existing += commitment.tranche
            commitment.tranches_left -= 1
        genco.funds = s.funds_start + s.delta
        s.funds_end = genco.funds
        settlements[gid] = s

    # 4. invest (the final simulated year makes no new commitments)
    investments = []
    investment_log = []
    if year < scenario.end_year:
        menu = candidate_menu(world.cost_table, year)
        for index, gid in enumerate(world.genco_order()):
            genco = world.gencos[gid]
            beliefs = BeliefSet(scenario, world.seed, index, year)
            commitment, evaluations = invest_step(
                genco, year, menu, beliefs, world.rep_year, scenario)
            investment_log.extend(evaluations)
            if commitment is not None:
                s = settlements[gid]
                s.capital_new += commitment.tranche
                # funds recomputed from the ledger so the money-conservation
                # identity funds_end == funds_start + delta holds exactly
                genco.funds = s.funds_start + s.delta
                s.funds_end = genco.funds
                world.commitments.append(commitment)
                world.plants.append(commitment.plant)
                investments.append(commitment)

    # 5. activate finished construction
    activated = []
    for commitment in list(world.commitments):
        if commitment.online_year <= year + 1 and commitment.tranches_left == 0:
            commitment.plant.status = "operating"
            activated.append(commitment.plant.plant_id)
            world.commitments.remove(commitment)

    # 6. advance
    world.year = year + 1

    energy_by_type: dict[str, float] = {}
    for plant in operating:
        energy_by_type[plant.plant_type] = energy_by_type.get(plant.plant_type, 0.0) \
            + energy[plant.plant_id]
    total = sum(energy_by_type.values())
    mix = {t: (e / total if total > 0 else 0.0) for t, e in energy_by_type.items()}

    return YearResult(
        year=year,
        energy_mwh=energy_by_type,
        mix=mix if total > 0 else {},
        unserved_mwh=unserved,
        n_clearings=n_clearings,
        prices=np.array(prices),
        price_hours=np.array(hours),
        settlements=settlements,
        funds={gid: world.gencos[gid].funds for gid in world.genco_order()},
        investments=investments,
        investment_log=investment_log,
        retired=retired,
        activated=activated,
        dispatch_detail=dispatch_detail,
    )


def evaluate_mix(world: World) -> dict[str, float]:
    """Current-fleet mix from a pure dispatch pass (no settlement, no
    mutation)."""
    _, _, energy, *_ = _dispatch_summary(world, world.year)
    by_type: dict[str, float] = {}
    for plant in world.operating_plants():
        by_type[plant.plant_type] = by_type.get(plant.plant_type, 0.0) + energy[plant.plant_id]
    total = sum(by_type.values())
    if total <= 0:
        return {}
    return {t: e / total for t, e in by_type.items()}


def run(world: World, horizon: int, sink=None) -> SimulationResult:
    """Simulate `horizon` years, persisting each YearResult through the
    optional sink callback as soon as it is complete. A zero horizon
    reports only the initial fleet's mix."""
    if horizon < 0:
        raise InputError("horizon must be >= 0")
    if horizon == 0:
        return SimulationResult(years=[], initial_mix=evaluate_mix(world))
    results = []
    for _ in range(horizon):
        result = step_year(world)
        results.append(result)
        if sink is not None:
            sink(result)
    return SimulationResult(years=results)
