#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace tanksched {

enum class VarKind : std::uint8_t { Continuous, Binary };

// Decision variable families, named by role. First-stage families commit
// before uncertainty resolves; everything else is scenario-indexed recourse.
enum class VarFamily : std::uint8_t {
    // first stage
    Dispatch,             // (s,c,p,t)   hourly volume sent toward a consumer
    DispatchByVehicle,    // (s,c,p,v)   horizon total per vehicle type
    RawSupply,            // (s,tf,p,t)  hourly raw volume sent to a TF
    RawSupplyByVehicle,   // (s,tf,p,v)  horizon total per vehicle type
    ExtraTankerCapacity,  // (r,v,p)     hired capacity in kiloliters
    // second stage (per scenario k)
    TfOperating,        // (s,t,k)      binary on/off
    TfProductSelect,    // (s,p,t,k)    binary product slotted while operating
    TfStartUp,          // (s,t,k)      relaxed 0/1 transition marker
    TfShutDown,         // (s,t,k)
    InventoryLevel,     // (s,i,p,t,k)
    BufferViolation,    // (s,i,p,t,k)  raw-side soft buffer shortfall
    TargetAbove,        // (s,i,p,t,k)  treated-side target overshoot
    TargetBelow,        // (s,i,p,t,k)  treated-side target undershoot
    DeliveryByVehicle,  // (s,c,p,v,t,k) hourly delivery split per vehicle
    RawByVehicle,       // (s,tf,p,v,t,k)
    TankerPool,         // (r,v,p,t,k)  capacity available at slot t
    DemandSurplus,      // (c,p,t,k)
    DemandShortfall,    // (c,p,t,k)
};

const char* family_name(VarFamily f);

// Constraint families. Counts per family are kept in MilpModel::family_counts.
enum class RowFamily : std::uint8_t {
    TfSwitching,         // start/stop transition linking, incl. slot-1 anchor
    TfMinUpDown,         // rolling-window minimum up/down time
    ProductSelection,    // exactly one product slotted while operating
    RawInventory,        // raw-side mass balance + initial level
    TreatedInventory,    // treated-side mass balance + initial level
    InventoryCapacity,   // hard min/max reservoir bounds
    BufferTarget,        // soft buffer (raw) and target (treated) levels
    GwExtraction,        // hourly ground-water extraction limit
    DemandBalance,       // arrivals + shortfall - surplus = demand
    VehicleAggregation,  // dispatch<->vehicle totals linking
    TimeCapacity,        // fleet busy-hours budget per pool
    TankerFlow,          // hourly pool recurrence + initial pool
    FirstStageFix,       // equality pins used by the expected-value model
};

const char* family_name(RowFamily f);

struct VarKey {
    VarFamily fam;
    std::array<std::int16_t, 4> e{-1, -1, -1, -1};  // entity indices (meaning per family)
    std::int16_t t = -1;                            // slot, 1-based; -1 when not indexed
    std::int16_t k = -1;                            // scenario; -1 for first stage

    friend bool operator==(const VarKey& a, const VarKey& b) {
        return a.fam == b.fam && a.e == b.e && a.t == b.t && a.k == b.k;
    }
};

struct VarKeyHash {
    std::size_t operator()(const VarKey& k) const {
        std::uint64_t h = std::uint64_t(k.fam);
        for (auto v : k.e) h = h * 0x100000001b3ULL + std::uint64_t(std::uint16_t(v));
        h = h * 0x100000001b3ULL + std::uint64_t(std::uint16_t(k.t));
        h = h * 0x100000001b3ULL + std::uint64_t(std::uint16_t(k.k));
        return std::size_t(h);
    }
};

struct MilpVar {
    VarKey key;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0, ub = 0.0;
    double obj = 0.0;
    // stage: -1 = first stage, otherwise the scenario index k
    int stage_k() const { return key.k; }
};

enum class Sense : char { Eq = 'E', Le = 'L', Ge = 'G' };

struct MilpRow {
    RowFamily fam;
    std::array<std::int16_t, 4> e{-1, -1, -1, -1};
    std::int16_t t = -1;
    std::int16_t k = -1;
    Sense sense = Sense::Eq;
    double rhs = 0.0;
    std::int64_t nz_begin = 0, nz_end = 0;  // range in the CSR arrays
};

// Name tables copied from the instance so a model can render names without
// keeping the instance alive.
struct NameTables {
    std::vector<std::string> region, source, consumer, product, vehicle, inventory;
};

// Sparse mixed-integer linear model, rows in canonical order (family, then
// index tuple with the scenario index last). Minimization.
class MilpModel {
public:
    std::vector<MilpVar> vars;
    std::vector<MilpRow> rows;
    std::vector<std::int32_t> nz_col;
    std::vector<double> nz_val;
    double obj_constant = 0.0;
    int num_scenarios = 0;
    // Deterministic variant: structurally a K=1 model whose variables all
    // count as first stage.
    bool all_first_stage = false;
    NameTables names;
    // family name -> emitted row count
    std::map<std::string, std::int64_t> family_counts;
    // objective component name -> sparse (col, coeff) terms; components
    // partition the objective exactly
    std::map<std::string, std::vector<std::pair<std::int32_t, double>>> objective_components;

    int num_vars() const { return int(vars.size()); }
    int num_rows() const { return int(rows.size()); }
    std::int64_t num_nonzeros() const { return std::int64_t(nz_val.size()); }
    bool is_first_stage(int col) const { return all_first_stage || vars[col].key.k < 0; }

    int add_var(const VarKey& key, VarKind kind, double lb, double ub);
    int var_index(const VarKey& key) const;      // -1 when absent
    int require_var(const VarKey& key) const;    // throws when absent

    // Row under construction: push coefficients then seal. Coefficients for a
    // repeated column are merged.
    void begin_row(RowFamily fam, std::array<std::int16_t, 4> e, int t, int k, Sense sense,
                   double rhs);
    void push_coeff(int col, double value);
    void end_row();

    void add_objective(const std::string& component, int col, double coeff);

    std::string var_name(int col) const;
    std::string row_name(int row) const;

    // Structural sanity used by builders/tests: every referenced column
    // exists, finite coefficients, stage tags consistent.
    void check_consistent() const;

private:
    std::unordered_map<VarKey, std::int32_t, VarKeyHash> index_;
    bool row_open_ = false;
    std::unordered_map<std::int32_t, std::size_t> open_cols_;
};

}  // namespace tanksched
