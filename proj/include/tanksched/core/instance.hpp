#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace tanksched {

enum class SourceType { FW, GW, TF };

std::string to_string(SourceType t);
SourceType source_type_from_string(const std::string& s);

enum class CongestionLevel { Nominal, High };

std::string to_string(CongestionLevel level);

struct ProductDef {
    std::string id;
    bool is_raw = false;
    bool tf_only = false;  // deliverable to consumers only from TF sources
};

struct VehicleDef {
    std::string id;
    double capacity_kl = 0.0;
};

struct SourceDef {
    std::string id;
    SourceType type = SourceType::FW;
    // GW only
    double max_extraction_kl_per_h = 0.0;
    // TF only
    double throughput_kl_per_h = 0.0;
    int min_uptime_h = 1;
    int min_downtime_h = 1;
    bool initially_operating = false;
    std::map<std::string, double> recovery;  // final product id -> recovered fraction
};

struct ConsumerDef {
    std::string id;
    std::string region;
    double distribution_time_h = 0.0;
};

struct InventoryCap {
    std::string source, inventory, product;
    double min_kl = 0.0;
    double max_kl = 0.0;
    double buffer_kl = 0.0;
    double initial_kl = 0.0;
    std::map<int, double> target_kl;  // slot (1-based) -> target level
};

struct DemandPenalty {
    double surplus_per_kl = 0.0;    // paid on over-delivery
    double shortfall_per_kl = 0.0;  // paid on unmet demand
};

// One (consumer, product, slot) cell with positive mean demand. Scenario
// demand vectors are aligned with Instance::demand_cells() ordering.
struct DemandCell {
    int consumer = -1, product = -1, slot = 0;
    double mean_kl = 0.0;
};

// Key packing for flat lookup tables: up to four 16-bit entity indices.
inline std::uint64_t pack_key(int a, int b = 0, int c = 0, int d = 0) {
    return (std::uint64_t(std::uint16_t(a)) << 48) | (std::uint64_t(std::uint16_t(b)) << 32) |
           (std::uint64_t(std::uint16_t(c)) << 16) | std::uint64_t(std::uint16_t(d));
}

// Complete deterministic problem description. Immutable after loading; all
// operations take it by const reference and never mutate shared state.
class Instance {
public:
    int schema_version = 1;
    std::string name;
    int horizon_nt = 0;
    double congestion_multiplier = 1.3;
    double demand_sigma = 0.2 / 3.0;  // sigma of the demand perturbation draw
    // slot_bounds[t-1] = {start_h, end_h}; generated hourly when absent from input
    std::vector<std::pair<double, double>> slot_bounds;

    std::vector<std::string> regions;
    std::vector<ProductDef> products;
    std::vector<VehicleDef> vehicles;
    std::vector<SourceDef> sources;
    std::vector<ConsumerDef> consumers;
    std::vector<std::string> inventories;  // e.g. RWI, TWI

    // Suitability relations, stored as index tuples (kept sorted, canonical).
    std::vector<std::pair<int, int>> rel_source_product;            // SP(s,p)
    std::vector<std::pair<int, int>> rel_source_consumer;           // SC(s,c)
    std::vector<std::pair<int, int>> rel_source_tf;                 // SS(s,s')
    std::vector<std::tuple<int, int, int>> rel_source_tf_product;   // SSP(s,s',p)
    std::vector<std::tuple<int, int, int, int>> rel_source_tf_product_vehicle;  // SSPV
    std::vector<std::tuple<int, int, int>> rel_consumer_product_vehicle;        // CPV(c,p,v)
    std::vector<std::pair<int, int>> rel_region_source;             // RS(r,s)
    std::vector<std::tuple<int, int, int>> rel_region_vehicle_product;          // RVP(r,v,p)
    std::vector<std::tuple<int, int, int>> rel_source_inventory_product;        // SIP(s,i,p)

    // Times (hours) and costs (currency per kiloliter unless noted).
    std::unordered_map<std::uint64_t, double> prep_h;              // (s,v)
    std::unordered_map<std::uint64_t, double> disinfection_h;      // (s,v), FW sources
    std::unordered_map<std::uint64_t, double> travel_consumer_h;   // (s,c,p,v)
    std::unordered_map<std::uint64_t, double> travel_tf_h;         // (s,s')
    std::unordered_map<std::uint64_t, double> cost_distribution;   // (s,c,p,v)
    std::unordered_map<std::uint64_t, double> cost_rw_supply;      // (s,s',p,v)
    std::unordered_map<std::uint64_t, double> cost_target_violation;  // (s,i,p)
    std::unordered_map<std::uint64_t, double> cost_buffer_violation;  // (s,i,p)
    std::unordered_map<std::uint64_t, double> cost_extra_tanker;   // (v,p), per tanker
    std::unordered_map<std::uint64_t, int> tanker_availability;    // (r,v,p)
    std::vector<DemandPenalty> demand_penalty;                     // per product index
    std::vector<InventoryCap> inventory_caps;

    // Mean demand De(c,p,t); zero cells are omitted.
    std::unordered_map<std::uint64_t, double> mean_demand;  // (c,p,t)
    // Optional demand bound data; accepted by the schema and ignored by every
    // operation (validator emits a warning when present).
    bool has_demand_bounds = false;

    // ---- index lookup -------------------------------------------------
    int region_index(const std::string& id) const { return find(region_idx_, id, "region"); }
    int product_index(const std::string& id) const { return find(product_idx_, id, "product"); }
    int vehicle_index(const std::string& id) const { return find(vehicle_idx_, id, "vehicle"); }
    int source_index(const std::string& id) const { return find(source_idx_, id, "source"); }
    int consumer_index(const std::string& id) const { return find(consumer_idx_, id, "consumer"); }
    int inventory_index(const std::string& id) const { return find(inventory_idx_, id, "inventory"); }

    int try_region_index(const std::string& id) const { return try_find(region_idx_, id); }
    int try_product_index(const std::string& id) const { return try_find(product_idx_, id); }
    int try_vehicle_index(const std::string& id) const { return try_find(vehicle_idx_, id); }
    int try_source_index(const std::string& id) const { return try_find(source_idx_, id); }
    int try_consumer_index(const std::string& id) const { return try_find(consumer_idx_, id); }
    int try_inventory_index(const std::string& id) const { return try_find(inventory_idx_, id); }

    // Rebuilds index maps and derived tables; call after mutating fields.
    void finalize();

    // ---- derived tables (built by finalize) ---------------------------
    struct ConsumerLeg {
        int source, consumer, product;     // SP & SC & final product
        std::vector<int> vehicles;         // CPV-compatible vehicles
    };
    struct RawLeg {
        int source, tf, product;           // SS & SSP & raw product
        std::vector<int> vehicles;         // SSPV-compatible vehicles
    };
    struct Pool {
        int region, vehicle, product;      // RVP
    };

    const std::vector<ConsumerLeg>& consumer_legs() const { return consumer_legs_; }
    const std::vector<RawLeg>& raw_legs() const { return raw_legs_; }
    const std::vector<Pool>& pools() const { return pools_; }
    const std::vector<DemandCell>& demand_cells() const { return demand_cells_; }
    const std::vector<int>& tf_sources() const { return tf_sources_; }
    const std::vector<int>& gw_sources() const { return gw_sources_; }
    // Inventory cells (s,i,p) from SIP, restricted to TF sources; index into
    // inventory_caps for each.
    const std::vector<int>& inventory_cells() const { return inventory_cells_; }
    // Regions a source serves (from RS), in index order.
    const std::vector<std::vector<int>>& source_regions() const { return source_regions_; }
    // Final products a TF can produce (SP & final), per source index.
    const std::vector<std::vector<int>>& tf_products() const { return tf_products_; }

    bool has_sp(int s, int p) const { return contains(sp_set_, pack_key(s, p)); }
    bool has_sc(int s, int c) const { return contains(sc_set_, pack_key(s, c)); }
    bool has_ss(int s, int s2) const { return contains(ss_set_, pack_key(s, s2)); }
    bool has_cpv(int c, int p, int v) const { return contains(cpv_set_, pack_key(c, p, v)); }
    bool has_rvp(int r, int v, int p) const { return contains(rvp_set_, pack_key(r, v, p)); }

    double mean_demand_at(int c, int p, int t) const {
        auto it = mean_demand.find(pack_key(c, p, t));
        return it == mean_demand.end() ? 0.0 : it->second;
    }

    double lookup_hours(const std::unordered_map<std::uint64_t, double>& table,
                        std::uint64_t key, const char* what) const;

    double multiplier(CongestionLevel level) const {
        return level == CongestionLevel::High ? congestion_multiplier : 1.0;
    }

    int tanker_count(int r, int v, int p) const {
        auto it = tanker_availability.find(pack_key(r, v, p));
        return it == tanker_availability.end() ? 0 : it->second;
    }

private:
    static int find(const std::unordered_map<std::string, int>& m, const std::string& id,
                    const char* what) {
        auto it = m.find(id);
        if (it == m.end()) throw std::out_of_range(std::string("unknown ") + what + " '" + id + "'");
        return it->second;
    }
    static int try_find(const std::unordered_map<std::string, int>& m, const std::string& id) {
        auto it = m.find(id);
        return it == m.end() ? -1 : it->second;
    }
    template <class Set>
    static bool contains(const Set& s, std::uint64_t k) {
        return s.find(k) != s.end();
    }

    std::unordered_map<std::string, int> region_idx_, product_idx_, vehicle_idx_, source_idx_,
        consumer_idx_, inventory_idx_;
    std::vector<ConsumerLeg> consumer_legs_;
    std::vector<RawLeg> raw_legs_;
    std::vector<Pool> pools_;
    std::vector<DemandCell> demand_cells_;
    std::vector<int> tf_sources_, gw_sources_;
    std::vector<int> inventory_cells_;
    std::vector<std::vector<int>> source_regions_;
    std::vector<std::vector<int>> tf_products_;
    std::unordered_map<std::uint64_t, char> sp_set_, sc_set_, ss_set_, cpv_set_, rvp_set_;
};

}  // namespace tanksched
