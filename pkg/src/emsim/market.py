"""Hourly merit-order dispatch under uniform pricing.

Generators bid their short-run marginal cost each hour; bids are
accepted in ascending price order until demand is met and every
dispatched plant earns the marginal bid's price. Shortfall hours price
at the configured cap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .ingest import InputError, PowerPlant, ScenarioConfig, SERIES_NAMES
from .repdays import DAYS_PER_YEAR, HOURS_PER_DAY, RepresentativeYear

log = logging.getLogger(__name__)


def marginal_cost(plant_type: str, efficiency: float, variable_om: float,
                  scenario: ScenarioConfig, year: int) -> float:
    """Short-run marginal cost in currency/MWh.

    fuel/eta + carbon x emissions/eta + variable O&M. Types absent from
    the scenario's fuel map burn nothing and cost only their variable
    O&M (wind, solar, hydro).
    """
    fuel = scenario.fuel_of(plant_type)
    if fuel is None:
        return variable_om
    if efficiency <= 0.0:
        raise InputError(f"fuel-burning plant type '{plant_type}' needs efficiency > 0")
    fuel_price = scenario.fuel_price_at(fuel, year)
    carbon = scenario.carbon_price_at(year) * scenario.emission_factor.get(fuel, 0.0)
    return fuel_price / efficiency + carbon / efficiency + variable_om


def srmc(plant: PowerPlant, scenario: ScenarioConfig, year: int) -> float:
    return marginal_cost(plant.plant_type, plant.costs.efficiency,
                         plant.costs.variable_om, scenario, year)


@dataclass(frozen=True)
class Bid:
    plant_id: str
    price: float
    quantity: float  # MW available this hour

    def __post_init__(self):
        if self.quantity < 0:
            raise InputError(f"bid quantity < 0 for '{self.plant_id}'")
        if not np.isfinite(self.price):
            raise InputError(f"non-finite bid price for '{self.plant_id}'")


@dataclass(frozen=True)
class ClearingResult:
    clearing_price: float
    dispatch: dict[str, float]  # plant id -> MW
    served: float
    unserved: float
    demand: float


def clear_market(bids: list[Bid], demand: float, price_cap: float = 300.0) -> ClearingResult:
    """Fill demand from the cheapest bids; the marginal bid sets the price.

    Ties on price are broken by larger quantity first, then plant id, so
    replays are deterministic. Zero demand clears at price 0; a supply
    shortfall leaves unserved demand priced at the cap.
    """
    if demand < 0:
        raise InputError("demand must be >= 0")
    dispatch = {b.plant_id: 0.0 for b in bids}
    if demand == 0:
        return ClearingResult(0.0, dispatch, 0.0, 0.0, demand)

    remaining = demand
    price = None
    for bid in sorted(bids, key=lambda b: (b.price, -b.quantity, b.plant_id)):
        if remaining <= 0:
            break
        if bid.quantity <= 0:
            continue
        take = min(bid.quantity, remaining)
        dispatch[bid.plant_id] += take
        remaining -= take
        price = bid.price

    if remaining > 0:
        return ClearingResult(price_cap, dispatch, demand - remaining, remaining, demand)
    return ClearingResult(price, dispatch, demand, 0.0, demand)


@dataclass
class DayDispatch:
    """24 hourly clearings of one weighted representative day."""

    clearings: list[ClearingResult]
    energy_mwh: dict[str, float] = field(default_factory=dict)       # plant id -> MWh/year
    market_revenue: dict[str, float] = field(default_factory=dict)   # plant id -> currency/year
    subsidy: dict[str, float] = field(default_factory=dict)          # out-of-market payments
    unserved_mwh: float = 0.0
    weight: float = 0.0

    @property
    def revenue(self) -> dict[str, float]:
        """Total revenue per plant: market payments plus subsidies."""
        return {pid: self.market_revenue[pid] + self.subsidy[pid]
                for pid in self.market_revenue}


def available_mw(plant: PowerPlant, day_profile: np.ndarray, hour: int) -> float:
    """Capacity offered in one hour: capacity x capacity factor for
    intermittent plants, full capacity otherwise (availability 1.0)."""
    series = plant.cf_series
    if series is None:
        return plant.capacity_mw
    cf = float(day_profile[SERIES_NAMES.index(series), hour])
    return plant.capacity_mw * min(max(cf, 0.0), 1.0)


def dispatch_day(plants: list[PowerPlant], costs_by_plant: dict[str, float],
                 day_profile: np.ndarray, weight: float, price_cap: float,
                 nuclear_subsidy: float = 0.0, demand_scale: float = 1.0) -> DayDispatch:
    """Clear all 24 hours of one representative day.

    `day_profile` is the (4, 24) array of demand and capacity factors.
    Energy and revenue are scaled to annual terms by weight x 365 hours
    per representative hour; nuclear plants additionally earn the
    per-MWh subsidy outside the market.
    """
    hours_per_sample = weight * DAYS_PER_YEAR
    result = DayDispatch(clearings=[], weight=weight)
    result.energy_mwh = {p.plant_id: 0.0 for p in plants}
    result.market_revenue = {p.plant_id: 0.0 for p in plants}
    result.subsidy = {p.plant_id: 0.0 for p in plants}
    subsidised = {p.plant_id for p in plants if p.plant_type == "Nuclear"}

    for h in range(HOURS_PER_DAY):
        bids = [
            Bid(p.plant_id, costs_by_plant[p.plant_id], available_mw(p, day_profile, h))
            for p in plants
        ]
        demand = float(day_profile[0, h]) * demand_scale
        clearing = clear_market(bids, demand, price_cap)
        result.clearings.append(clearing)
        result.unserved_mwh += clearing.unserved * hours_per_sample
        for pid, mw in clearing.dispatch.items():
            if mw == 0.0:
                continue
            mwh = mw * hours_per_sample
            result.energy_mwh[pid] += mwh
            result.market_revenue[pid] += mwh * clearing.clearing_price
            if pid in subsidised:
                result.subsidy[pid] += mwh * nuclear_subsidy
    return result


def dispatch_year(plants: list[PowerPlant], costs_by_plant: dict[str, float],
                  rep_year: RepresentativeYear, price_cap: float,
                  nuclear_subsidy: float = 0.0, demand_scale: float = 1.0) -> list[DayDispatch]:
    """Dispatch every weighted representative day of a year."""
    return [
        dispatch_day(plants, costs_by_plant, rep_year.day_profile(c),
                     float(rep_year.cluster_weights[c]), price_cap,
                     nuclear_subsidy, demand_scale)
        for c in range(rep_year.k)
    ]
