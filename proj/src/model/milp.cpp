#include "tanksched/model/milp.hpp"

#include <cmath>
#include <stdexcept>

namespace tanksched {

const char* family_name(VarFamily f) {
    switch (f) {
        case VarFamily::Dispatch: return "dispatch";
        case VarFamily::DispatchByVehicle: return "dispatch_by_vehicle";
        case VarFamily::RawSupply: return "raw_supply";
        case VarFamily::RawSupplyByVehicle: return "raw_supply_by_vehicle";
        case VarFamily::ExtraTankerCapacity: return "extra_tanker_capacity";
        case VarFamily::TfOperating: return "tf_operating";
        case VarFamily::TfProductSelect: return "tf_product_select";
        case VarFamily::TfStartUp: return "tf_start_up";
        case VarFamily::TfShutDown: return "tf_shut_down";
        case VarFamily::InventoryLevel: return "inventory_level";
        case VarFamily::BufferViolation: return "buffer_violation";
        case VarFamily::TargetAbove: return "target_above";
        case VarFamily::TargetBelow: return "target_below";
        case VarFamily::DeliveryByVehicle: return "delivery_by_vehicle";
        case VarFamily::RawByVehicle: return "raw_by_vehicle";
        case VarFamily::TankerPool: return "tanker_pool";
        case VarFamily::DemandSurplus: return "demand_surplus";
        case VarFamily::DemandShortfall: return "demand_shortfall";
    }
    return "?";
}

const char* family_name(RowFamily f) {
    switch (f) {
        case RowFamily::TfSwitching: return "tf_switching";
        case RowFamily::TfMinUpDown: return "tf_min_up_down";
        case RowFamily::ProductSelection: return "product_selection";
        case RowFamily::RawInventory: return "raw_inventory";
        case RowFamily::TreatedInventory: return "treated_inventory";
        case RowFamily::InventoryCapacity: return "inventory_capacity";
        case RowFamily::BufferTarget: return "buffer_target";
        case RowFamily::GwExtraction: return "gw_extraction";
        case RowFamily::DemandBalance: return "demand_balance";
        case RowFamily::VehicleAggregation: return "vehicle_aggregation";
        case RowFamily::TimeCapacity: return "time_capacity";
        case RowFamily::TankerFlow: return "tanker_flow";
        case RowFamily::FirstStageFix: return "first_stage_fix";
    }
    return "?";
}

int MilpModel::add_var(const VarKey& key, VarKind kind, double lb, double ub) {
    auto [it, inserted] = index_.emplace(key, std::int32_t(vars.size()));
    if (!inserted) throw std::logic_error("duplicate variable " + var_name(it->second));
    MilpVar v;
    v.key = key;
    v.kind = kind;
    v.lb = lb;
    v.ub = ub;
    vars.push_back(v);
    return int(vars.size()) - 1;
}

int MilpModel::var_index(const VarKey& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? -1 : int(it->second);
}

int MilpModel::require_var(const VarKey& key) const {
    int idx = var_index(key);
    if (idx < 0) {
        VarKey k = key;
        throw std::logic_error(std::string("model references missing variable of family ") +
                               family_name(k.fam));
    }
    return idx;
}

void MilpModel::begin_row(RowFamily fam, std::array<std::int16_t, 4> e, int t, int k, Sense sense,
                          double rhs) {
    if (row_open_) throw std::logic_error("begin_row while a row is open");
    MilpRow r;
    r.fam = fam;
    r.e = e;
    r.t = std::int16_t(t);
    r.k = std::int16_t(k);
    r.sense = sense;
    r.rhs = rhs;
    r.nz_begin = std::int64_t(nz_val.size());
    r.nz_end = r.nz_begin;
    rows.push_back(r);
    row_open_ = true;
    open_cols_.clear();
}

void MilpModel::push_coeff(int col, double value) {
    if (!row_open_) throw std::logic_error("push_coeff without an open row");
    if (col < 0 || col >= int(vars.size()))
        throw std::logic_error("push_coeff references an unknown column");
    if (value == 0.0) return;
    auto it = open_cols_.find(col);
    if (it != open_cols_.end()) {
        nz_val[it->second] += value;
        return;
    }
    open_cols_.emplace(col, nz_val.size());
    nz_col.push_back(col);
    nz_val.push_back(value);
}

void MilpModel::end_row() {
    if (!row_open_) throw std::logic_error("end_row without an open row");
    rows.back().nz_end = std::int64_t(nz_val.size());
    row_open_ = false;
    ++family_counts[family_name(rows.back().fam)];
}

void MilpModel::add_objective(const std::string& component, int col, double coeff) {
    if (coeff == 0.0) return;
    vars[col].obj += coeff;
    objective_components[component].emplace_back(col, coeff);
}

namespace {
void append_entities(const MilpModel& m, VarFamily f, const std::array<std::int16_t, 4>& e,
                     std::string& out) {
    // Entity slot meaning per family, used only for rendering.
    auto src = [&](int i) { return m.names.source[i]; };
    auto con = [&](int i) { return m.names.consumer[i]; };
    auto prod = [&](int i) { return m.names.product[i]; };
    auto veh = [&](int i) { return m.names.vehicle[i]; };
    auto reg = [&](int i) { return m.names.region[i]; };
    auto inv = [&](int i) { return m.names.inventory[i]; };
    switch (f) {
        case VarFamily::Dispatch:
            out += src(e[0]) + "," + con(e[1]) + "," + prod(e[2]);
            break;
        case VarFamily::DispatchByVehicle:
            out += src(e[0]) + "," + con(e[1]) + "," + prod(e[2]) + "," + veh(e[3]);
            break;
        case VarFamily::RawSupply:
            out += src(e[0]) + "," + src(e[1]) + "," + prod(e[2]);
            break;
        case VarFamily::RawSupplyByVehicle:
            out += src(e[0]) + "," + src(e[1]) + "," + prod(e[2]) + "," + veh(e[3]);
            break;
        case VarFamily::ExtraTankerCapacity:
            out += reg(e[0]) + "," + veh(e[1]) + "," + prod(e[2]);
            break;
        case VarFamily::TfOperating:
        case VarFamily::TfStartUp:
        case VarFamily::TfShutDown:
            out += src(e[0]);
            break;
        case VarFamily::TfProductSelect:
            out += src(e[0]) + "," + prod(e[1]);
            break;
        case VarFamily::InventoryLevel:
        case VarFamily::BufferViolation:
        case VarFamily::TargetAbove:
        case VarFamily::TargetBelow:
            out += src(e[0]) + "," + inv(e[1]) + "," + prod(e[2]);
            break;
        case VarFamily::DeliveryByVehicle:
            out += src(e[0]) + "," + con(e[1]) + "," + prod(e[2]) + "," + veh(e[3]);
            break;
        case VarFamily::RawByVehicle:
            out += src(e[0]) + "," + src(e[1]) + "," + prod(e[2]) + "," + veh(e[3]);
            break;
        case VarFamily::TankerPool:
            out += reg(e[0]) + "," + veh(e[1]) + "," + prod(e[2]);
            break;
        case VarFamily::DemandSurplus:
        case VarFamily::DemandShortfall:
            out += con(e[0]) + "," + prod(e[1]);
            break;
    }
}
}  // namespace

std::string MilpModel::var_name(int col) const {
    const MilpVar& v = vars[col];
    std::string out = family_name(v.key.fam);
    out += "[";
    append_entities(*this, v.key.fam, v.key.e, out);
    if (v.key.t >= 0) out += ",t" + std::to_string(v.key.t);
    if (v.key.k >= 0) out += ",k" + std::to_string(v.key.k);
    out += "]";
    return out;
}

std::string MilpModel::row_name(int row) const {
    const MilpRow& r = rows[row];
    std::string out = family_name(r.fam);
    out += "[";
    bool first = true;
    for (auto e : r.e) {
        if (e < 0) break;
        if (!first) out += ",";
        out += "e" + std::to_string(e);
        first = false;
    }
    if (r.t >= 0) out += (first ? "" : ",") + std::string("t") + std::to_string(r.t), first = false;
    if (r.k >= 0) out += (first ? "" : ",") + std::string("k") + std::to_string(r.k);
    out += "]#" + std::to_string(row);
    return out;
}

void MilpModel::check_consistent() const {
    if (row_open_) throw std::logic_error("model left with an open row");
    for (const MilpRow& r : rows) {
        for (std::int64_t i = r.nz_begin; i < r.nz_end; ++i) {
            if (nz_col[i] < 0 || nz_col[i] >= int(vars.size()))
                throw std::logic_error("row references a column out of range");
            if (!std::isfinite(nz_val[i])) throw std::logic_error("non-finite row coefficient");
        }
        if (!std::isfinite(r.rhs)) throw std::logic_error("non-finite right-hand side");
    }
    for (const MilpVar& v : vars) {
        if (!std::isfinite(v.obj)) throw std::logic_error("non-finite objective coefficient");
        if (v.lb > v.ub) throw std::logic_error("variable with crossed bounds: " +
                                                var_name(int(&v - vars.data())));
    }
}

}  // namespace tanksched
