#include "tanksched/core/validate.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace tanksched {

namespace {

class Checker {
public:
    explicit Checker(const Instance& inst) : inst_(inst) {}

    ValidationReport run() {
        basics();
        slot_bounds();
        source_parameters();
        inventory_caps();
        relations();
        demand_coverage();
        leg_data_present();
        if (inst_.has_demand_bounds)
            warn("demand_bounds_kl", "demand bound data is accepted but not used by any model");
        return std::move(report_);
    }

private:
    const Instance& inst_;
    ValidationReport report_;

    void fail(const std::string& path, const std::string& msg) {
        report_.violations.push_back({path, msg});
    }
    void warn(const std::string& path, const std::string& msg) {
        report_.warnings.push_back({path, msg});
    }

    void basics() {
        if (inst_.horizon_nt < 1) fail("horizon_nt", "must be a positive number of hourly slots");
        if (inst_.congestion_multiplier < 1.0)
            fail("congestion_multiplier", "must be >= 1");
        if (inst_.demand_sigma <= 0.0) fail("demand_sigma", "must be > 0");
        if (inst_.sources.empty()) fail("sources", "at least one source is required");
        if (inst_.regions.empty()) fail("regions", "at least one region is required");
        if (inst_.products.empty()) fail("products", "at least one product is required");
        std::set<std::string> seen;
        for (auto& s : inst_.sources)
            if (!seen.insert(s.id).second) fail("sources." + s.id, "duplicate identifier");
    }

    void slot_bounds() {
        if (int(inst_.slot_bounds.size()) != inst_.horizon_nt) {
            fail("slot_bounds", "must have exactly horizon_nt entries");
            return;
        }
        for (int t = 0; t < inst_.horizon_nt; ++t) {
            auto [ts, te] = inst_.slot_bounds[t];
            if (std::abs((te - ts) - 1.0) > 1e-9)
                fail("slot_bounds[" + std::to_string(t + 1) + "]",
                     "slot must span exactly one hour");
            if (t + 1 < inst_.horizon_nt &&
                std::abs(inst_.slot_bounds[t + 1].first - te) > 1e-9)
                fail("slot_bounds[" + std::to_string(t + 2) + "]",
                     "slot start must equal previous slot end");
        }
    }

    void source_parameters() {
        for (auto& s : inst_.sources) {
            if (s.type == SourceType::GW && s.max_extraction_kl_per_h <= 0.0)
                fail("sources." + s.id + ".max_extraction_kl_per_h",
                     "ground water source needs a positive hourly extraction limit");
            if (s.type == SourceType::TF) {
                if (s.throughput_kl_per_h <= 0.0)
                    fail("sources." + s.id + ".throughput_kl_per_h",
                         "treatment facility needs a positive throughput");
                if (s.min_uptime_h < 1)
                    fail("sources." + s.id + ".min_uptime_h", "must be >= 1 hour");
                if (s.min_downtime_h < 1)
                    fail("sources." + s.id + ".min_downtime_h", "must be >= 1 hour");
                for (auto& [pid, beta] : s.recovery) {
                    if (inst_.try_product_index(pid) < 0)
                        fail("sources." + s.id + ".recovery." + pid, "unknown product");
                    if (beta <= 0.0 || beta > 1.0)
                        fail("sources." + s.id + ".recovery." + pid,
                             "recovered fraction must lie in (0,1]");
                }
            }
        }
        for (auto& v : inst_.vehicles)
            if (v.capacity_kl <= 0.0)
                fail("vehicles." + v.id + ".capacity_kl", "must be positive");
    }

    void inventory_caps() {
        for (auto& cap : inst_.inventory_caps) {
            std::string path = "inventory_caps[" + cap.source + "," + cap.inventory + "," +
                               cap.product + "]";
            if (inst_.try_source_index(cap.source) < 0) fail(path, "unknown source");
            if (inst_.try_inventory_index(cap.inventory) < 0) fail(path, "unknown inventory");
            if (inst_.try_product_index(cap.product) < 0) fail(path, "unknown product");
            if (cap.min_kl > cap.buffer_kl || cap.buffer_kl > cap.max_kl)
                fail(path, "requires min <= buffer <= max");
            for (auto& [t, target] : cap.target_kl) {
                if (t < 1 || t > inst_.horizon_nt)
                    fail(path + ".target_kl[" + std::to_string(t) + "]", "slot out of horizon");
                if (target < cap.min_kl || target > cap.max_kl)
                    fail(path + ".target_kl[" + std::to_string(t) + "]",
                         "target must lie within [min, max]");
            }
            if (cap.initial_kl < cap.min_kl || cap.initial_kl > cap.max_kl)
                fail(path + ".initial_kl", "initial quantity must lie within [min, max]");
        }
    }

    template <class Pair>
    void check_pair_rel(const std::vector<Pair>& rel, const char* name, int lim_a, int lim_b) {
        for (auto& [a, b] : rel)
            if (a < 0 || a >= lim_a || b < 0 || b >= lim_b)
                fail(std::string("suitability.") + name, "dangling reference");
    }

    void relations() {
        int ns = int(inst_.sources.size()), nc = int(inst_.consumers.size());
        int np = int(inst_.products.size()), nv = int(inst_.vehicles.size());
        int nr = int(inst_.regions.size()), ni = int(inst_.inventories.size());
        check_pair_rel(inst_.rel_source_product, "source_product", ns, np);
        check_pair_rel(inst_.rel_source_consumer, "source_consumer", ns, nc);
        check_pair_rel(inst_.rel_source_tf, "source_tf", ns, ns);
        check_pair_rel(inst_.rel_region_source, "region_source", nr, ns);
        for (auto& [s, s2, p] : inst_.rel_source_tf_product)
            if (s < 0 || s >= ns || s2 < 0 || s2 >= ns || p < 0 || p >= np)
                fail("suitability.source_tf_product", "dangling reference");
        for (auto& [s, s2, p, v] : inst_.rel_source_tf_product_vehicle)
            if (s < 0 || s >= ns || s2 < 0 || s2 >= ns || p < 0 || p >= np || v < 0 || v >= nv)
                fail("suitability.source_tf_product_vehicle", "dangling reference");
        for (auto& [c, p, v] : inst_.rel_consumer_product_vehicle)
            if (c < 0 || c >= nc || p < 0 || p >= np || v < 0 || v >= nv)
                fail("suitability.consumer_product_vehicle", "dangling reference");
        for (auto& [r, v, p] : inst_.rel_region_vehicle_product)
            if (r < 0 || r >= nr || v < 0 || v >= nv || p < 0 || p >= np)
                fail("suitability.region_vehicle_product", "dangling reference");
        for (auto& [s, i, p] : inst_.rel_source_inventory_product)
            if (s < 0 || s >= ns || i < 0 || i >= ni || p < 0 || p >= np)
                fail("suitability.source_inventory_product", "dangling reference");

        for (auto& [s, s2] : inst_.rel_source_tf)
            if (s2 >= 0 && s2 < ns && inst_.sources[s2].type != SourceType::TF)
                fail("suitability.source_tf[" + inst_.sources[s].id + "," + inst_.sources[s2].id +
                         "]",
                     "raw water can only be supplied to a treatment facility");

        for (auto& c : inst_.consumers)
            if (inst_.try_region_index(c.region) < 0)
                fail("consumers." + c.id + ".region", "unknown region '" + c.region + "'");

        // Every dispatching leg must have a tanker pool behind it.
        for (auto& leg : inst_.consumer_legs())
            for (int v : leg.vehicles)
                for (int r : inst_.source_regions()[leg.source])
                    if (!inst_.has_rvp(r, v, leg.product))
                        fail("suitability.region_vehicle_product",
                             "leg " + inst_.sources[leg.source].id + "->" +
                                 inst_.consumers[leg.consumer].id + " needs pool (" +
                                 inst_.regions[r] + "," + inst_.vehicles[v].id + "," +
                                 inst_.products[leg.product].id + ")");
        for (auto& leg : inst_.raw_legs())
            for (int v : leg.vehicles)
                for (int r : inst_.source_regions()[leg.source])
                    if (!inst_.has_rvp(r, v, leg.product))
                        fail("suitability.region_vehicle_product",
                             "raw leg " + inst_.sources[leg.source].id + "->" +
                                 inst_.sources[leg.tf].id + " needs pool (" + inst_.regions[r] +
                                 "," + inst_.vehicles[v].id + "," +
                                 inst_.products[leg.product].id + ")");
    }

    void demand_coverage() {
        std::set<std::pair<int, int>> pairs;
        for (auto& cell : inst_.demand_cells()) pairs.insert({cell.consumer, cell.product});
        for (auto& [c, p] : pairs) {
            std::string path = "mean_demand_kl[" + inst_.consumers[c].id + "," +
                               inst_.products[p].id + "]";
            if (inst_.products[p].is_raw) {
                fail(path, "consumers cannot demand a raw product");
                continue;
            }
            bool any_source = false, any_non_tf = false;
            for (int s = 0; s < int(inst_.sources.size()); ++s) {
                if (inst_.has_sp(s, p) && inst_.has_sc(s, c)) {
                    any_source = true;
                    if (inst_.sources[s].type != SourceType::TF) any_non_tf = true;
                }
            }
            if (!any_source) fail(path, "no source is suitable for this demand");
            if (inst_.products[p].tf_only && any_non_tf)
                fail(path, "product '" + inst_.products[p].id +
                               "' must be supplied by treatment facilities only");
            bool any_vehicle = false;
            for (int v = 0; v < int(inst_.vehicles.size()); ++v)
                if (inst_.has_cpv(c, p, v)) any_vehicle = true;
            if (!any_vehicle) fail(path, "no vehicle is compatible with this demand");
        }
        for (auto& cell : inst_.demand_cells())
            if (cell.slot < 1 || cell.slot > inst_.horizon_nt)
                fail("mean_demand_kl[" + inst_.consumers[cell.consumer].id + "," +
                         inst_.products[cell.product].id + "," + std::to_string(cell.slot) + "]",
                     "demand slot outside the horizon");
    }

    // Times and costs referenced by the model must exist for every leg.
    void leg_data_present() {
        auto need = [&](const std::unordered_map<std::uint64_t, double>& table,
                        std::uint64_t key, const std::string& path) {
            if (table.find(key) == table.end()) fail(path, "required entry is missing");
        };
        for (auto& leg : inst_.consumer_legs()) {
            if (leg.vehicles.empty())
                fail("suitability.consumer_product_vehicle",
                     "leg " + inst_.sources[leg.source].id + "->" +
                         inst_.consumers[leg.consumer].id + " (" +
                         inst_.products[leg.product].id + ") has no compatible vehicle");
            for (int v : leg.vehicles) {
                std::string tag = inst_.sources[leg.source].id + "," +
                                  inst_.consumers[leg.consumer].id + "," +
                                  inst_.products[leg.product].id + "," + inst_.vehicles[v].id;
                need(inst_.travel_consumer_h,
                     pack_key(leg.source, leg.consumer, leg.product, v),
                     "times.travel_consumer_h[" + tag + "]");
                need(inst_.prep_h, pack_key(leg.source, v),
                     "times.prep_h[" + inst_.sources[leg.source].id + "," +
                         inst_.vehicles[v].id + "]");
                need(inst_.cost_distribution,
                     pack_key(leg.source, leg.consumer, leg.product, v),
                     "costs.distribution_per_kl[" + tag + "]");
            }
        }
        for (auto& leg : inst_.raw_legs()) {
            for (int v : leg.vehicles) {
                std::string tag = inst_.sources[leg.source].id + "," + inst_.sources[leg.tf].id +
                                  "," + inst_.products[leg.product].id + "," +
                                  inst_.vehicles[v].id;
                need(inst_.travel_tf_h, pack_key(leg.source, leg.tf),
                     "times.travel_tf_h[" + inst_.sources[leg.source].id + "," +
                         inst_.sources[leg.tf].id + "]");
                need(inst_.prep_h, pack_key(leg.source, v),
                     "times.prep_h[" + inst_.sources[leg.source].id + "," +
                         inst_.vehicles[v].id + "]");
                need(inst_.cost_rw_supply, pack_key(leg.source, leg.tf, leg.product, v),
                     "costs.rw_supply_per_kl[" + tag + "]");
            }
        }
        if (inst_.demand_penalty.size() != inst_.products.size())
            fail("costs.demand_penalty", "needs one (surplus, shortfall) entry per product");
    }
};

}  // namespace

ValidationReport validate_instance(const Instance& inst) { return Checker(inst).run(); }

}  // namespace tanksched
