#include "tanksched/core/instance.hpp"

#include <algorithm>

namespace tanksched {

std::string to_string(SourceType t) {
    switch (t) {
        case SourceType::FW: return "FW";
        case SourceType::GW: return "GW";
        case SourceType::TF: return "TF";
    }
    return "?";
}

SourceType source_type_from_string(const std::string& s) {
    if (s == "FW") return SourceType::FW;
    if (s == "GW") return SourceType::GW;
    if (s == "TF") return SourceType::TF;
    throw std::invalid_argument("unknown source type '" + s + "' (expected FW, GW or TF)");
}

std::string to_string(CongestionLevel level) {
    return level == CongestionLevel::High ? "HIGH" : "NOMINAL";
}

double Instance::lookup_hours(const std::unordered_map<std::uint64_t, double>& table,
                              std::uint64_t key, const char* what) const {
    auto it = table.find(key);
    if (it == table.end()) throw std::out_of_range(std::string("missing entry: ") + what);
    return it->second;
}

void Instance::finalize() {
    auto index_of = [](auto& map, const auto& items, auto id_of) {
        map.clear();
        for (int i = 0; i < int(items.size()); ++i) map[id_of(items[i])] = i;
    };
    index_of(region_idx_, regions, [](const std::string& s) { return s; });
    index_of(product_idx_, products, [](const ProductDef& p) { return p.id; });
    index_of(vehicle_idx_, vehicles, [](const VehicleDef& v) { return v.id; });
    index_of(source_idx_, sources, [](const SourceDef& s) { return s.id; });
    index_of(consumer_idx_, consumers, [](const ConsumerDef& c) { return c.id; });
    index_of(inventory_idx_, inventories, [](const std::string& s) { return s; });

    if (slot_bounds.empty()) {
        slot_bounds.reserve(horizon_nt);
        for (int t = 1; t <= horizon_nt; ++t) slot_bounds.emplace_back(t - 1.0, double(t));
    }

    auto sort_unique = [](auto& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    sort_unique(rel_source_product);
    sort_unique(rel_source_consumer);
    sort_unique(rel_source_tf);
    sort_unique(rel_source_tf_product);
    sort_unique(rel_source_tf_product_vehicle);
    sort_unique(rel_consumer_product_vehicle);
    sort_unique(rel_region_source);
    sort_unique(rel_region_vehicle_product);
    sort_unique(rel_source_inventory_product);

    sp_set_.clear();
    sc_set_.clear();
    ss_set_.clear();
    cpv_set_.clear();
    rvp_set_.clear();
    for (auto& [s, p] : rel_source_product) sp_set_[pack_key(s, p)] = 1;
    for (auto& [s, c] : rel_source_consumer) sc_set_[pack_key(s, c)] = 1;
    for (auto& [s, s2] : rel_source_tf) ss_set_[pack_key(s, s2)] = 1;
    for (auto& [c, p, v] : rel_consumer_product_vehicle) cpv_set_[pack_key(c, p, v)] = 1;
    for (auto& [r, v, p] : rel_region_vehicle_product) rvp_set_[pack_key(r, v, p)] = 1;

    tf_sources_.clear();
    gw_sources_.clear();
    for (int s = 0; s < int(sources.size()); ++s) {
        if (sources[s].type == SourceType::TF) tf_sources_.push_back(s);
        if (sources[s].type == SourceType::GW) gw_sources_.push_back(s);
    }

    // Consumer legs: (s,c,p) with SP & SC, p final; vehicles from CPV.
    consumer_legs_.clear();
    for (int s = 0; s < int(sources.size()); ++s) {
        for (int c = 0; c < int(consumers.size()); ++c) {
            if (!has_sc(s, c)) continue;
            for (int p = 0; p < int(products.size()); ++p) {
                if (products[p].is_raw || !has_sp(s, p)) continue;
                ConsumerLeg leg{s, c, p, {}};
                for (int v = 0; v < int(vehicles.size()); ++v)
                    if (has_cpv(c, p, v)) leg.vehicles.push_back(v);
                consumer_legs_.push_back(std::move(leg));
            }
        }
    }

    // Raw legs: (s,s',p) with SS & SSP, p raw; vehicles from SSPV.
    raw_legs_.clear();
    for (auto& [s, s2, p] : rel_source_tf_product) {
        if (!products[p].is_raw || !has_ss(s, s2)) continue;
        RawLeg leg{s, s2, p, {}};
        for (auto& [a, b, q, v] : rel_source_tf_product_vehicle)
            if (a == s && b == s2 && q == p) leg.vehicles.push_back(v);
        raw_legs_.push_back(std::move(leg));
    }

    pools_.clear();
    for (auto& [r, v, p] : rel_region_vehicle_product) pools_.push_back({r, v, p});

    demand_cells_.clear();
    for (int c = 0; c < int(consumers.size()); ++c)
        for (int p = 0; p < int(products.size()); ++p)
            for (int t = 1; t <= horizon_nt; ++t) {
                double de = mean_demand_at(c, p, t);
                if (de > 0.0) demand_cells_.push_back({c, p, t, de});
            }

    inventory_cells_.clear();
    for (int i = 0; i < int(inventory_caps.size()); ++i) inventory_cells_.push_back(i);

    source_regions_.assign(sources.size(), {});
    for (auto& [r, s] : rel_region_source) source_regions_[s].push_back(r);

    tf_products_.assign(sources.size(), {});
    for (int s : tf_sources_)
        for (int p = 0; p < int(products.size()); ++p)
            if (!products[p].is_raw && has_sp(s, p)) tf_products_[s].push_back(p);
}

}  // namespace tanksched
