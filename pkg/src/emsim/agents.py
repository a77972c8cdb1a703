"""Generation company agents and their investment appraisal.

GenCos form expectations of future electricity prices with a linear
predicted price duration curve (price = m x demand + c), optionally
perturbed per company to model divergent beliefs. Candidate plants are
compared by the net present value of their expected cash flows and the
best positive-NPV candidate a company can afford is committed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .ingest import CF_SERIES, InputError, PlantCosts, PowerPlant, ScenarioConfig
from .market import marginal_cost
from .repdays import RepresentativeYear

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PriceCurve:
    """Linear predicted price duration curve: price(x) = m*x + c."""

    m: float  # currency/MWh per MW of demand
    c: float  # currency/MWh intercept

    def price(self, demand_mw):
        return self.m * np.asarray(demand_mw, dtype=float) + self.c


def predicted_price(curve: PriceCurve, demand_mw: float) -> float:
    if demand_mw < 0:
        raise InputError("demand must be >= 0")
    return float(curve.price(demand_mw))


def sample_belief(base: PriceCurve, sigma_m: float, sigma_c: float,
                  rng: np.random.Generator) -> PriceCurve:
    """Perturb a base curve with independent normal noise on m and c.

    Zero sigmas reproduce the base curve exactly (no RNG draw), so a
    deterministic scenario stays bit-reproducible.
    """
    if sigma_m < 0 or sigma_c < 0:
        raise InputError("sigmas must be >= 0")
    m = base.m if sigma_m == 0 else float(rng.normal(base.m, sigma_m))
    c = base.c if sigma_c == 0 else float(rng.normal(base.c, sigma_c))
    return PriceCurve(m, c)


class BeliefSet:
    """One GenCo's per-year price expectations for one simulated year.

    Curves are sampled lazily but deterministically: the draw for a
    target year depends only on (root seed, simulated year, genco index,
    target year), so evaluation order never changes results.
    """

    def __init__(self, scenario: ScenarioConfig, root_seed: int, genco_index: int,
                 sim_year: int):
        self._scenario = scenario
        self._root = root_seed
        self._genco = genco_index
        self._sim_year = sim_year
        self._cache: dict[int, PriceCurve] = {}

    def curve(self, year: int) -> PriceCurve:
        if year not in self._cache:
            m, c = self._scenario.curve_params_at(year)
            base = PriceCurve(m, c)
            rng = np.random.default_rng(
                [self._root, self._sim_year, self._genco, year]
            )
            self._cache[year] = sample_belief(
                base, self._scenario.sigma_m, self._scenario.sigma_c, rng
            )
        return self._cache[year]


@dataclass(frozen=True)
class InvestmentCandidate:
    plant_type: str
    capacity_mw: float
    costs: PlantCosts

    @property
    def lead_years(self) -> int:
        """Years of pre-development plus construction before operation."""
        return int(round(self.costs.predev_period + self.costs.construction_period))

    @property
    def operating_years(self) -> int:
        return int(round(self.costs.operating_period))

    @property
    def capital_total(self) -> float:
        return ((self.costs.predev_cost + self.costs.construction_cost) * self.capacity_mw
                + self.costs.infrastructure_cost)

    @property
    def capital_tranches(self) -> int:
        """Capital is spread uniformly over the lead years (one tranche
        when there is no lead time)."""
        return max(1, self.lead_years)


def candidate_menu(cost_table, year: int, plant_types=None) -> list[InvestmentCandidate]:
    """One candidate per type: the largest capacity the table offers,
    costed by lookup at the given year."""
    menu = []
    for ptype in sorted(plant_types) if plant_types else cost_table.types():
        caps = [k[1] for k in cost_table.keys_for(ptype)]
        capacity = max(caps)
        costs = cost_table.lookup(ptype, capacity, year)
        menu.append(InvestmentCandidate(ptype, capacity, costs))
    return menu


def expected_cashflow(candidate: InvestmentCandidate, beliefs: BeliefSet,
                      rep_year: RepresentativeYear, scenario: ScenarioConfig,
                      commit_year: int) -> np.ndarray:
    """Per-year net cash flows of a candidate committed this year.

    Capital is charged over the lead years; every operating year pays
    fixed O&M and earns the expected margin: for each weighted
    representative hour the predicted price (curve evaluated at that
    hour's scaled demand, plus the nuclear subsidy for nuclear) is
    compared with the candidate's marginal cost — intermittent plants
    sell capacity x capacity factor regardless, dispatchable plants sell
    full capacity only in hours where the expected price covers cost.
    Scenario prices beyond the configured horizon hold their last value.
    """
    if not scenario.start_year <= commit_year <= scenario.end_year:
        raise InputError(f"commitment year {commit_year} outside scenario years")
    lead = candidate.lead_years
    n_years = lead + candidate.operating_years
    cashflow = np.zeros(n_years if n_years > 0 else 1)

    tranche = candidate.capital_total / candidate.capital_tranches
    cashflow[:candidate.capital_tranches] -= tranche

    demand = rep_year.series("demand")
    weights = rep_year.hour_weights
    is_intermittent = candidate.plant_type in CF_SERIES
    if is_intermittent:
        cf = rep_year.series(CF_SERIES[candidate.plant_type])

    fixed = candidate.costs.fixed_om * candidate.capacity_mw
    for t in range(lead, n_years):
        year = commit_year + t
        curve = beliefs.curve(year)
        scale = scenario.demand_scale_at(year)
        prices = curve.price(demand * scale)
        if candidate.plant_type == "Nuclear":
            prices = prices + scenario.nuclear_subsidy
        cost = marginal_cost(candidate.plant_type, candidate.costs.efficiency,
                             candidate.costs.variable_om, scenario, year)
        if is_intermittent:
            sold = candidate.capacity_mw * cf
        else:
            sold = np.where(prices >= cost, candidate.capacity_mw, 0.0)
        margin = float(((prices - cost) * sold) @ weights)
        cashflow[t] += margin - fixed
    return cashflow


def npv(cashflows, discount_rate: float) -> float:
    """Net present value: sum of R_t / (1 + i)^t with t counted from 0.

    A zero discount rate reduces to the plain sum exactly.
    """
    if discount_rate <= -1:
        raise InputError("discount rate must be > -1")
    r = np.asarray(cashflows, dtype=float)
    if discount_rate == 0.0:
        return float(r.sum())
    discounts = (1.0 + discount_rate) ** -np.arange(len(r))
    return float(r @ discounts)


@dataclass
class GenCo:
    """A generation company: an id and a funds ledger."""

    genco_id: str
    funds: float


@dataclass
class Commitment:
    """A plant under construction with its remaining capital schedule."""

    plant: PowerPlant
    committed_year: int
    online_year: int
    tranche: float
    tranches_left: int


@dataclass(frozen=True)
class InvestmentEvaluation:
    genco_id: str
    year: int
    plant_type: str
    capacity_mw: float
    npv: float
    committed: bool
    online_year: int
    affordable: bool


def invest_step(genco: GenCo, year: int, menu: list[InvestmentCandidate],
                beliefs: BeliefSet, rep_year: RepresentativeYear,
                scenario: ScenarioConfig) -> tuple[Commitment | None, list[InvestmentEvaluation]]:
    """Evaluate the candidate menu and commit to at most one plant.

    The highest-NPV candidate is committed if its NPV is positive and
    the company can pay the first capital tranche; the tranche is
    deducted immediately and the remainder falls due over the lead
    years.
    """
    evaluations: list[InvestmentEvaluation] = []
    best: InvestmentCandidate | None = None
    best_npv = 0.0
    idx = -1
    for i, cand in enumerate(menu):
        flows = expected_cashflow(cand, beliefs, rep_year, scenario, year)
        value = npv(flows, scenario.discount_rate)
        evaluations.append(InvestmentEvaluation(
            genco.genco_id, year, cand.plant_type, cand.capacity_mw, value,
            committed=False, online_year=year + cand.lead_years, affordable=True,
        ))
        if value > best_npv:
            best, best_npv, idx = cand, value, i

    if best is None:
        return None, evaluations
    tranche = best.capital_total / best.capital_tranches
    if genco.funds < tranche:
        log.info("%s: cannot afford %s (needs %.0f, has %.0f)",
                 genco.genco_id, best.plant_type, tranche, genco.funds)
        evaluations[idx] = InvestmentEvaluation(
            genco.genco_id, year, best.plant_type, best.capacity_mw, best_npv,
            committed=False, online_year=year + best.lead_years, affordable=False,
        )
        return None, evaluations

    online = year + best.lead_years
    plant = PowerPlant(
        plant_id=f"{genco.genco_id}-{best.plant_type}-{year}",
        owner_id=genco.genco_id,
        plant_type=best.plant_type,
        capacity_mw=best.capacity_mw,
        construction_year=online,
        costs=best.costs,
        status="under_construction",
    )
    genco.funds -= tranche
    evaluations[idx] = InvestmentEvaluation(
        genco.genco_id, year, best.plant_type, best.capacity_mw, best_npv,
        committed=True, online_year=online, affordable=True,
    )
    log.info("%s commits to %s %.0f MW (npv %.0f, online %d)",
             genco.genco_id, best.plant_type, best.capacity_mw, best_npv, online)
    return Commitment(plant, year, online, tranche, best.capital_tranches - 1), evaluations
