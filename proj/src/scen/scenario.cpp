#include "tanksched/scen/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tanksched/util/rng.hpp"

namespace tanksched {

using ordered_json = nlohmann::ordered_json;

namespace {
constexpr double kTruncation = 0.2;  // +/-20% around the mean

std::uint64_t cell_stream_seed(std::uint64_t seed, const Instance& inst, const DemandCell& cell,
                               int k) {
    std::uint64_t h = mix64(seed, hash_text("demand"));
    h = mix64(h, hash_text(inst.consumers[cell.consumer].id));
    h = mix64(h, hash_text(inst.products[cell.product].id));
    h = mix64(h, std::uint64_t(cell.slot));
    return mix64(h, std::uint64_t(k));
}
}  // namespace

ScenarioSet sample_demand_scenarios(const Instance& inst, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_demand_scenarios: n must be >= 1");
    const auto& cells = inst.demand_cells();
    ScenarioSet set;
    set.kind = ScenarioSet::Kind::DemandOnly;
    set.generator_seed = seed;
    set.generator_name = Rng::kName;
    set.sigma = inst.demand_sigma;
    set.truncation = kTruncation;
    set.scenarios.resize(n);
    for (int k = 0; k < n; ++k) {
        Scenario& s = set.scenarios[k];
        s.id = k;
        s.probability = 1.0 / n;
        s.congestion = CongestionLevel::Nominal;
        s.demand.resize(cells.size());
        s.xi.resize(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            Rng rng(cell_stream_seed(seed, inst, cells[i], k));
            double xi = rng.next_truncated_normal(inst.demand_sigma, kTruncation);
            s.xi[i] = xi;
            s.demand[i] = cells[i].mean_kl * (1.0 + xi);
        }
    }
    return set;
}

ScenarioSet expand_travel_time(const ScenarioSet& base, double p_high) {
    if (base.kind != ScenarioSet::Kind::DemandOnly)
        throw std::invalid_argument("expand_travel_time: set is already expanded");
    if (p_high < 0.0 || p_high > 1.0)
        throw std::invalid_argument("expand_travel_time: p_high must lie in [0,1]");
    ScenarioSet out;
    out.kind = ScenarioSet::Kind::Hybrid;
    out.generator_seed = base.generator_seed;
    out.generator_name = base.generator_name;
    out.sigma = base.sigma;
    out.truncation = base.truncation;
    out.p_high = p_high;
    out.scenarios.reserve(base.scenarios.size() * 2);
    int id = 0;
    for (const Scenario& s : base.scenarios) {
        Scenario nominal = s;
        nominal.id = id++;
        nominal.probability = s.probability * (1.0 - p_high);
        nominal.congestion = CongestionLevel::Nominal;
        out.scenarios.push_back(std::move(nominal));
        Scenario high = s;
        high.id = id++;
        high.probability = s.probability * p_high;
        high.congestion = CongestionLevel::High;
        out.scenarios.push_back(std::move(high));
    }
    return out;
}

Scenario mean_scenario(const Instance& inst) {
    const auto& cells = inst.demand_cells();
    Scenario s;
    s.id = 0;
    s.probability = 1.0;
    s.congestion = CongestionLevel::Nominal;
    s.demand.resize(cells.size());
    s.xi.assign(cells.size(), 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) s.demand[i] = cells[i].mean_kl;
    return s;
}

std::string scenario_set_to_json(const ScenarioSet& set, const Instance& inst) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = set.kind == ScenarioSet::Kind::Hybrid ? "hybrid" : "demand_only";
    j["generator"] = set.generator_name;
    j["seed"] = set.generator_seed;
    j["sigma"] = set.sigma;
    j["truncation"] = set.truncation;
    if (set.kind == ScenarioSet::Kind::Hybrid) j["p_high"] = set.p_high;
    j["cells"] = ordered_json::array();
    for (auto& cell : inst.demand_cells())
        j["cells"].push_back({inst.consumers[cell.consumer].id, inst.products[cell.product].id,
                              cell.slot, cell.mean_kl});
    j["scenarios"] = ordered_json::array();
    for (auto& s : set.scenarios) {
        ordered_json row;
        row["id"] = s.id;
        row["probability"] = s.probability;
        row["congestion"] = to_string(s.congestion);
        row["xi"] = s.xi;
        row["demand_kl"] = s.demand;
        j["scenarios"].push_back(row);
    }
    return j.dump(2) + "\n";
}

ScenarioSet scenario_set_from_json(const std::string& text, const Instance& inst) {
    ordered_json j = ordered_json::parse(text);
    ScenarioSet set;
    set.kind = j.at("kind").get<std::string>() == "hybrid" ? ScenarioSet::Kind::Hybrid
                                                           : ScenarioSet::Kind::DemandOnly;
    set.generator_name = j.at("generator").get<std::string>();
    set.generator_seed = j.at("seed").get<std::uint64_t>();
    set.sigma = j.at("sigma").get<double>();
    set.truncation = j.at("truncation").get<double>();
    if (j.contains("p_high")) set.p_high = j.at("p_high").get<double>();
    if (j.at("cells").size() != inst.demand_cells().size())
        throw std::runtime_error("scenario set does not match the instance demand cells");
    for (auto& row : j.at("scenarios")) {
        Scenario s;
        s.id = row.at("id").get<int>();
        s.probability = row.at("probability").get<double>();
        s.congestion = row.at("congestion").get<std::string>() == "HIGH" ? CongestionLevel::High
                                                                         : CongestionLevel::Nominal;
        s.xi = row.at("xi").get<std::vector<double>>();
        s.demand = row.at("demand_kl").get<std::vector<double>>();
        if (s.demand.size() != inst.demand_cells().size())
            throw std::runtime_error("scenario demand vector has the wrong length");
        set.scenarios.push_back(std::move(s));
    }
    return set;
}

void save_scenario_set(const ScenarioSet& set, const Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scenario file '" + path + "'");
    out << scenario_set_to_json(set, inst);
}

ScenarioSet load_scenario_set(const std::string& path, const Instance& inst) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_set_from_json(ss.str(), inst);
}

}  // namespace tanksched
