#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tanksched/core/instance.hpp"

namespace tanksched {

// One discrete uncertainty realization. Demand values are aligned with
// Instance::demand_cells(); xi holds the perturbation draws used (the audit
// record needed to replay generation).
struct Scenario {
    int id = 0;
    double probability = 1.0;
    CongestionLevel congestion = CongestionLevel::Nominal;
    std::vector<double> demand;
    std::vector<double> xi;
};

struct ScenarioSet {
    enum class Kind { DemandOnly, Hybrid };
    Kind kind = Kind::DemandOnly;
    std::uint64_t generator_seed = 0;
    std::string generator_name;
    double sigma = 0.0;       // echo of the sigma used for the draws
    double truncation = 0.2;  // demand perturbations are hard-truncated to +/- this
    double p_high = 0.0;      // Hybrid only
    std::vector<Scenario> scenarios;

    int size() const { return int(scenarios.size()); }
};

// Monte Carlo demand sampling: n scenarios with demand = De * (1 + xi), xi
// drawn from N(0, sigma) truncated to +/-20%, equal probabilities 1/n, all
// congestion NOMINAL. One derived substream per ((c,p,t) cell, k), so results
// are independent of evaluation order and adding scenarios or cells never
// perturbs earlier draws.
ScenarioSet sample_demand_scenarios(const Instance& inst, int n, std::uint64_t seed);

// Splits every demand scenario into a NOMINAL and a HIGH travel-time node
// with probabilities pi*(1-p_high) and pi*p_high; demands are shared. The
// result has exactly 2N scenarios, NOMINAL copies first in pair order.
ScenarioSet expand_travel_time(const ScenarioSet& base, double p_high);

// Degenerate single "scenario" at the mean demand, NOMINAL congestion,
// probability one. Anchor for the deterministic model.
Scenario mean_scenario(const Instance& inst);

// Demand of scenario k at a demand-cell index.
inline double scenario_demand(const Scenario& s, int cell) { return s.demand[cell]; }

std::string scenario_set_to_json(const ScenarioSet& set, const Instance& inst);
ScenarioSet scenario_set_from_json(const std::string& text, const Instance& inst);
void save_scenario_set(const ScenarioSet& set, const Instance& inst, const std::string& path);
ScenarioSet load_scenario_set(const std::string& path, const Instance& inst);

}  // namespace tanksched
