#pragma once

#include <unordered_map>

#include "tanksched/core/instance.hpp"
#include "tanksched/model/milp.hpp"
#include "tanksched/scen/scenario.hpp"

namespace tanksched {

// First-stage variable values extracted from a solved model, keyed by
// variable identity so they can be pinned into another model built from the
// same instance.
struct FirstStageValues {
    std::unordered_map<VarKey, double, VarKeyHash> values;
};

FirstStageValues extract_first_stage(const MilpModel& model, const std::vector<double>& x);

// Equivalent deterministic form of the two-stage recourse problem over the
// given scenario set. First stage commits hourly dispatch quantities,
// per-vehicle totals and extra tanker capacity; recourse covers treatment
// operation, inventories, per-vehicle hourly splits, tanker pools and demand
// shortfall/surplus per scenario. Rows are emitted in canonical order.
MilpModel build_tsr(const Instance& inst, const ScenarioSet& scen);

// Single-scenario deterministic model: identical structure with K=1,
// probability one, and every variable tagged first-stage.
MilpModel build_dt(const Instance& inst, const Scenario& scenario);

// Recourse evaluation of a fixed first-stage plan: the TSR model plus one
// equality row per first-stage variable pinning it to the given value.
// Missing values raise a structural error.
MilpModel build_ev(const Instance& inst, const ScenarioSet& scen, const FirstStageValues& fix);

}  // namespace tanksched
