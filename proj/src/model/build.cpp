#include "tanksched/model/build.hpp"

#include <cmath>
#include <stdexcept>

#include "tanksched/core/transit.hpp"

namespace tanksched {

namespace {

constexpr double kInf = 1e30;

std::array<std::int16_t, 4> ee(int a = -1, int b = -1, int c = -1, int d = -1) {
    return {std::int16_t(a), std::int16_t(b), std::int16_t(c), std::int16_t(d)};
}

class Builder {
public:
    Builder(const Instance& inst, const ScenarioSet& scen, bool all_first_stage)
        : inst_(inst), scen_(scen), nt_(inst.horizon_nt) {
        if (scen_.scenarios.empty())
            throw std::invalid_argument("model build: scenario set is empty");
        for (const Scenario& s : scen_.scenarios)
            if (s.demand.size() != inst_.demand_cells().size())
                throw std::invalid_argument(
                    "model build: scenario demand vector does not match the instance "
                    "demand cells");
        m_.num_scenarios = scen_.size();
        m_.all_first_stage = all_first_stage;
        m_.names.region = inst.regions;
        for (auto& s : inst.sources) m_.names.source.push_back(s.id);
        for (auto& c : inst.consumers) m_.names.consumer.push_back(c.id);
        for (auto& p : inst.products) m_.names.product.push_back(p.id);
        for (auto& v : inst.vehicles) m_.names.vehicle.push_back(v.id);
        m_.names.inventory = inst.inventories;
        split_inventory_cells();
    }

    MilpModel build() {
        create_variables();
        add_tf_switching();
        add_min_up_down();
        add_product_selection();
        add_raw_inventory();
        add_treated_inventory();
        add_capacity_bounds();
        add_buffer_target();
        add_gw_limit();
        add_demand_balance();
        add_vehicle_aggregation();
        add_time_capacity();
        add_tanker_flow();
        set_objective();
        m_.check_consistent();
        return std::move(m_);
    }

private:
    const Instance& inst_;
    const ScenarioSet& scen_;
    const int nt_;
    MilpModel m_;
    std::vector<int> raw_cells_, treated_cells_;  // indices into inst_.inventory_caps

    CongestionLevel level(int k) const { return scen_.scenarios[k].congestion; }
    int K() const { return scen_.size(); }

    void split_inventory_cells() {
        for (int i = 0; i < int(inst_.inventory_caps.size()); ++i) {
            const auto& cap = inst_.inventory_caps[i];
            int p = inst_.product_index(cap.product);
            (inst_.products[p].is_raw ? raw_cells_ : treated_cells_).push_back(i);
        }
    }

    struct CellIdx {
        int s, i, p;
        const InventoryCap* cap;
    };
    CellIdx cell(int idx) const {
        const auto& cap = inst_.inventory_caps[idx];
        return {inst_.source_index(cap.source), inst_.inventory_index(cap.inventory),
                inst_.product_index(cap.product), &cap};
    }

    // ---- variables ----------------------------------------------------

    void create_variables() {
        // First stage, in canonical family order.
        for (auto& leg : inst_.consumer_legs())
            for (int t = 1; t <= nt_; ++t)
                m_.add_var({VarFamily::Dispatch, ee(leg.source, leg.consumer, leg.product),
                            std::int16_t(t), -1},
                           VarKind::Continuous, 0.0, kInf);
        for (auto& leg : inst_.consumer_legs())
            for (int v : leg.vehicles)
                m_.add_var({VarFamily::DispatchByVehicle,
                            ee(leg.source, leg.consumer, leg.product, v), -1, -1},
                           VarKind::Continuous, 0.0, kInf);
        for (auto& leg : inst_.raw_legs())
            for (int t = 1; t <= nt_; ++t)
                m_.add_var({VarFamily::RawSupply, ee(leg.source, leg.tf, leg.product),
                            std::int16_t(t), -1},
                           VarKind::Continuous, 0.0, kInf);
        for (auto& leg : inst_.raw_legs())
            for (int v : leg.vehicles)
                m_.add_var({VarFamily::RawSupplyByVehicle,
                            ee(leg.source, leg.tf, leg.product, v), -1, -1},
                           VarKind::Continuous, 0.0, kInf);
        for (auto& pool : inst_.pools())
            m_.add_var({VarFamily::ExtraTankerCapacity, ee(pool.region, pool.vehicle, pool.product),
                        -1, -1},
                       VarKind::Continuous, 0.0, kInf);

        for (int k = 0; k < K(); ++k) {
            for (int s : inst_.tf_sources())
                for (int t = 1; t <= nt_; ++t)
                    m_.add_var({VarFamily::TfOperating, ee(s), std::int16_t(t), std::int16_t(k)},
                               VarKind::Binary, 0.0, 1.0);
            for (int s : inst_.tf_sources())
                for (int p : inst_.tf_products()[s])
                    for (int t = 1; t <= nt_; ++t)
                        m_.add_var({VarFamily::TfProductSelect, ee(s, p), std::int16_t(t),
                                    std::int16_t(k)},
                                   VarKind::Binary, 0.0, 1.0);
            // Start/stop markers follow the continuous-variable convention;
            // the binary operating state forces them to 0/1 at transitions.
            for (int s : inst_.tf_sources())
                for (int t = 1; t <= nt_; ++t)
                    m_.add_var({VarFamily::TfStartUp, ee(s), std::int16_t(t), std::int16_t(k)},
                               VarKind::Continuous, 0.0, 1.0);
            for (int s : inst_.tf_sources())
                for (int t = 1; t <= nt_; ++t)
                    m_.add_var({VarFamily::TfShutDown, ee(s), std::int16_t(t), std::int16_t(k)},
                               VarKind::Continuous, 0.0, 1.0);
            for (int idx : raw_cells_) append_inventory_vars(idx, k);
            for (int idx : treated_cells_) append_inventory_vars(idx, k);
            for (int idx : raw_cells_) {
                CellIdx c = cell(idx);
                for (int t = 1; t <= nt_; ++t)
                    m_.add_var({VarFamily::BufferViolation, ee(c.s, c.i, c.p), std::int16_t(t),
                                std::int16_t(k)},
                               VarKind::Continuous, 0.0, kInf);
            }
            for (int idx : treated_cells_) {
                CellIdx c = cell(idx);
                for (auto& [t, target] : c.cap->target_kl) {
                    if (target <= 0.0) continue;
                    m_.add_var({VarFamily::TargetAbove, ee(c.s, c.i, c.p), std::int16_t(t),
                                std::int16_t(k)},
                               VarKind::Continuous, 0.0, kInf);
                    m_.add_var({VarFamily::TargetBelow, ee(c.s, c.i, c.p), std::int16_t(t),
                                std::int16_t(k)},
                               VarKind::Continuous, 0.0, kInf);
                }
            }
            for (auto& leg : inst_.consumer_legs())
                for (int v : leg.vehicles)
                    for (int t = 1; t <= nt_; ++t)
                        m_.add_var({VarFamily::DeliveryByVehicle,
                                    ee(leg.source, leg.consumer, leg.product, v), std::int16_t(t),
                                    std::int16_t(k)},
                                   VarKind::Continuous, 0.0, kInf);
            for (auto& leg : inst_.raw_legs())
                for (int v : leg.vehicles)
                    for (int t = 1; t <= nt_; ++t)
                        m_.add_var({VarFamily::RawByVehicle,
                                    ee(leg.source, leg.tf, leg.product, v), std::int16_t(t),
                                    std::int16_t(k)},
                                   VarKind::Continuous, 0.0, kInf);
            for (auto& pool : inst_.pools())
                for (int t = 1; t <= nt_; ++t)
                    m_.add_var({VarFamily::TankerPool, ee(pool.region, pool.vehicle, pool.product),
                                std::int16_t(t), std::int16_t(k)},
                               VarKind::Continuous, 0.0, kInf);
            for (auto& dc : inst_.demand_cells()) {
                m_.add_var({VarFamily::DemandSurplus, ee(dc.consumer, dc.product),
                            std::int16_t(dc.slot), std::int16_t(k)},
                           VarKind::Continuous, 0.0, kInf);
                m_.add_var({VarFamily::DemandShortfall, ee(dc.consumer, dc.product),
                            std::int16_t(dc.slot), std::int16_t(k)},
                           VarKind::Continuous, 0.0, kInf);
            }
        }
    }

    void append_inventory_vars(int idx, int k) {
        CellIdx c = cell(idx);
        for (int t = 1; t <= nt_; ++t)
            m_.add_var({VarFamily::InventoryLevel, ee(c.s, c.i, c.p), std::int16_t(t),
                        std::int16_t(k)},
                       VarKind::Continuous, 0.0, kInf);
    }

    int var(VarFamily f, std::array<std::int16_t, 4> e, int t, int k) const {
        return m_.require_var({f, e, std::int16_t(t), std::int16_t(k)});
    }

    // ---- constraint families -------------------------------------------

    // Start-up/shut-down transition linking across consecutive slots, with the
    // first slot anchored to the initial operating state.
    void add_tf_switching() {
        for (int s : inst_.tf_sources()) {
            double op_ini = inst_.sources[s].initially_operating ? 1.0 : 0.0;
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::TfSwitching, ee(s), t, k, Sense::Eq,
                                 t == 1 ? -op_ini : 0.0);
                    m_.push_coeff(var(VarFamily::TfStartUp, ee(s), t, k), 1.0);
                    m_.push_coeff(var(VarFamily::TfShutDown, ee(s), t, k), -1.0);
                    m_.push_coeff(var(VarFamily::TfOperating, ee(s), t, k), -1.0);
                    if (t > 1) m_.push_coeff(var(VarFamily::TfOperating, ee(s), t - 1, k), 1.0);
                    m_.end_row();
                }
        }
    }

    // Rolling-window start/stop sums bounded by the operating state.
    void add_min_up_down() {
        for (int s : inst_.tf_sources()) {
            int ut = inst_.sources[s].min_uptime_h;
            int dt = inst_.sources[s].min_downtime_h;
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::TfMinUpDown, ee(s, 0), t, k, Sense::Le, 0.0);
                    for (int mth = std::max(1, t - ut + 1); mth <= t; ++mth)
                        m_.push_coeff(var(VarFamily::TfStartUp, ee(s), mth, k), 1.0);
                    m_.push_coeff(var(VarFamily::TfOperating, ee(s), t, k), -1.0);
                    m_.end_row();
                    m_.begin_row(RowFamily::TfMinUpDown, ee(s, 1), t, k, Sense::Le, 1.0);
                    for (int mth = std::max(1, t - dt + 1); mth <= t; ++mth)
                        m_.push_coeff(var(VarFamily::TfShutDown, ee(s), mth, k), 1.0);
                    m_.push_coeff(var(VarFamily::TfOperating, ee(s), t, k), 1.0);
                    m_.end_row();
                }
        }
    }

    // Exactly one final product slotted in every operating hour.
    void add_product_selection() {
        for (int s : inst_.tf_sources())
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::ProductSelection, ee(s), t, k, Sense::Eq, 0.0);
                    for (int p : inst_.tf_products()[s])
                        m_.push_coeff(var(VarFamily::TfProductSelect, ee(s, p), t, k), 1.0);
                    m_.push_coeff(var(VarFamily::TfOperating, ee(s), t, k), -1.0);
                    m_.end_row();
                }
    }

    double production_draw_per_hour(int s, int p_final) const {
        const SourceDef& src = inst_.sources[s];
        auto it = src.recovery.find(inst_.products[p_final].id);
        if (it == src.recovery.end())
            throw std::invalid_argument("model build: source " + src.id +
                                        " lacks a recovery fraction for product " +
                                        inst_.products[p_final].id);
        return src.throughput_kl_per_h / it->second;
    }

    // Raw-side mass balance: inflow lagged by the scenario transit, outflow
    // at throughput/recovery while producing. Slot 1 pins the initial level.
    void add_raw_inventory() {
        for (int idx : raw_cells_) {
            CellIdx c = cell(idx);
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    if (t == 1) {
                        m_.begin_row(RowFamily::RawInventory, ee(c.s, c.i, c.p), t, k, Sense::Eq,
                                     c.cap->initial_kl);
                        m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                        m_.end_row();
                        continue;
                    }
                    m_.begin_row(RowFamily::RawInventory, ee(c.s, c.i, c.p), t, k, Sense::Eq, 0.0);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t - 1, k),
                                  -1.0);
                    for (auto& leg : inst_.raw_legs()) {
                        if (leg.tf != c.s || leg.product != c.p) continue;
                        int lag = arrival_lag_tf(inst_, leg, level(k));
                        if (t - lag >= 1)
                            m_.push_coeff(var(VarFamily::RawSupply,
                                              ee(leg.source, leg.tf, leg.product), t - lag, -1),
                                          -1.0);
                    }
                    for (int p : inst_.tf_products()[c.s])
                        m_.push_coeff(var(VarFamily::TfProductSelect, ee(c.s, p), t, k),
                                      production_draw_per_hour(c.s, p));
                    m_.end_row();
                }
        }
    }

    // Treated-side mass balance: production inflow, consumer dispatch outflow.
    void add_treated_inventory() {
        for (int idx : treated_cells_) {
            CellIdx c = cell(idx);
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    if (t == 1) {
                        m_.begin_row(RowFamily::TreatedInventory, ee(c.s, c.i, c.p), t, k,
                                     Sense::Eq, c.cap->initial_kl);
                        m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                        m_.end_row();
                        continue;
                    }
                    m_.begin_row(RowFamily::TreatedInventory, ee(c.s, c.i, c.p), t, k, Sense::Eq,
                                 0.0);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t - 1, k),
                                  -1.0);
                    m_.push_coeff(var(VarFamily::TfProductSelect, ee(c.s, c.p), t, k),
                                  -inst_.sources[c.s].throughput_kl_per_h);
                    for (auto& leg : inst_.consumer_legs())
                        if (leg.source == c.s && leg.product == c.p)
                            m_.push_coeff(var(VarFamily::Dispatch,
                                              ee(leg.source, leg.consumer, leg.product), t, -1),
                                          1.0);
                    m_.end_row();
                }
        }
    }

    // Hard reservoir bounds, one >= and one <= row per level.
    void add_capacity_bounds() {
        for (int idx : inventory_cell_order()) {
            CellIdx c = cell(idx);
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::InventoryCapacity, ee(c.s, c.i, c.p, 0), t, k,
                                 Sense::Ge, c.cap->min_kl);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.end_row();
                    m_.begin_row(RowFamily::InventoryCapacity, ee(c.s, c.i, c.p, 1), t, k,
                                 Sense::Le, c.cap->max_kl);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.end_row();
                }
        }
    }

    std::vector<int> inventory_cell_order() const {
        std::vector<int> order = raw_cells_;
        order.insert(order.end(), treated_cells_.begin(), treated_cells_.end());
        return order;
    }

    // Soft buffer level on raw reservoirs; soft target level on treated ones.
    void add_buffer_target() {
        for (int idx : raw_cells_) {
            CellIdx c = cell(idx);
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::BufferTarget, ee(c.s, c.i, c.p, 0), t, k, Sense::Ge,
                                 c.cap->buffer_kl);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.push_coeff(var(VarFamily::BufferViolation, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.end_row();
                }
        }
        for (int idx : treated_cells_) {
            CellIdx c = cell(idx);
            for (auto& [t, target] : c.cap->target_kl) {
                if (target <= 0.0) continue;
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::BufferTarget, ee(c.s, c.i, c.p, 1), t, k, Sense::Eq,
                                 target);
                    m_.push_coeff(var(VarFamily::InventoryLevel, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.push_coeff(var(VarFamily::TargetAbove, ee(c.s, c.i, c.p), t, k), -1.0);
                    m_.push_coeff(var(VarFamily::TargetBelow, ee(c.s, c.i, c.p), t, k), 1.0);
                    m_.end_row();
                }
            }
        }
    }

    // Hourly extraction cap per ground-water supply leg.
    void add_gw_limit() {
        for (auto& leg : inst_.raw_legs()) {
            const SourceDef& src = inst_.sources[leg.source];
            if (src.max_extraction_kl_per_h <= 0.0) continue;
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::GwExtraction, ee(leg.source, leg.tf, leg.product), t,
                                 k, Sense::Le, src.max_extraction_kl_per_h);
                    m_.push_coeff(
                        var(VarFamily::RawSupply, ee(leg.source, leg.tf, leg.product), t, -1),
                        1.0);
                    m_.end_row();
                }
        }
    }

    // Arrivals lagged by the scenario transit plus shortfall minus surplus
    // equal the realized demand; rows exist only for positive-demand cells.
    void add_demand_balance() {
        const auto& cells = inst_.demand_cells();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const DemandCell& dc = cells[i];
            for (int k = 0; k < K(); ++k) {
                double de = scen_.scenarios[k].demand[i];
                if (de <= 0.0) continue;
                m_.begin_row(RowFamily::DemandBalance, ee(dc.consumer, dc.product), dc.slot, k,
                             Sense::Eq, de);
                for (auto& leg : inst_.consumer_legs()) {
                    if (leg.consumer != dc.consumer || leg.product != dc.product) continue;
                    int lag = arrival_lag_consumer(inst_, leg, level(k));
                    if (dc.slot - lag >= 1)
                        m_.push_coeff(var(VarFamily::Dispatch,
                                          ee(leg.source, leg.consumer, leg.product),
                                          dc.slot - lag, -1),
                                      1.0);
                }
                m_.push_coeff(
                    var(VarFamily::DemandShortfall, ee(dc.consumer, dc.product), dc.slot, k), 1.0);
                m_.push_coeff(
                    var(VarFamily::DemandSurplus, ee(dc.consumer, dc.product), dc.slot, k), -1.0);
                m_.end_row();
            }
        }
    }

    // Linking between hourly dispatch, per-vehicle hourly splits and
    // per-vehicle horizon totals, for both consumer and raw supply.
    void add_vehicle_aggregation() {
        for (auto& leg : inst_.consumer_legs())
            for (int k = 0; k < K(); ++k) {
                m_.begin_row(RowFamily::VehicleAggregation,
                             ee(leg.source, leg.consumer, leg.product, 0), -1, k, Sense::Eq, 0.0);
                for (int t = 1; t <= nt_; ++t)
                    m_.push_coeff(
                        var(VarFamily::Dispatch, ee(leg.source, leg.consumer, leg.product), t, -1),
                        1.0);
                for (int v : leg.vehicles)
                    m_.push_coeff(var(VarFamily::DispatchByVehicle,
                                      ee(leg.source, leg.consumer, leg.product, v), -1, -1),
                                  -1.0);
                m_.end_row();
            }
        for (auto& leg : inst_.raw_legs())
            for (int k = 0; k < K(); ++k) {
                m_.begin_row(RowFamily::VehicleAggregation, ee(leg.source, leg.tf, leg.product, 1),
                             -1, k, Sense::Eq, 0.0);
                for (int t = 1; t <= nt_; ++t)
                    m_.push_coeff(
                        var(VarFamily::RawSupply, ee(leg.source, leg.tf, leg.product), t, -1),
                        1.0);
                for (int v : leg.vehicles)
                    m_.push_coeff(var(VarFamily::RawSupplyByVehicle,
                                      ee(leg.source, leg.tf, leg.product, v), -1, -1),
                                  -1.0);
                m_.end_row();
            }
        for (auto& leg : inst_.consumer_legs())
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::VehicleAggregation,
                                 ee(leg.source, leg.consumer, leg.product, 2), t, k, Sense::Eq,
                                 0.0);
                    for (int v : leg.vehicles)
                        m_.push_coeff(var(VarFamily::DeliveryByVehicle,
                                          ee(leg.source, leg.consumer, leg.product, v), t, k),
                                      1.0);
                    m_.push_coeff(
                        var(VarFamily::Dispatch, ee(leg.source, leg.consumer, leg.product), t, -1),
                        -1.0);
                    m_.end_row();
                }
        for (auto& leg : inst_.consumer_legs())
            for (int v : leg.vehicles)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::VehicleAggregation,
                                 ee(leg.source, leg.consumer, leg.product, 3), v, k, Sense::Eq,
                                 0.0);
                    for (int t = 1; t <= nt_; ++t)
                        m_.push_coeff(var(VarFamily::DeliveryByVehicle,
                                          ee(leg.source, leg.consumer, leg.product, v), t, k),
                                      1.0);
                    m_.push_coeff(var(VarFamily::DispatchByVehicle,
                                      ee(leg.source, leg.consumer, leg.product, v), -1, -1),
                                  -1.0);
                    m_.end_row();
                }
        for (auto& leg : inst_.raw_legs())
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::VehicleAggregation,
                                 ee(leg.source, leg.tf, leg.product, 4), t, k, Sense::Eq, 0.0);
                    for (int v : leg.vehicles)
                        m_.push_coeff(var(VarFamily::RawByVehicle,
                                          ee(leg.source, leg.tf, leg.product, v), t, k),
                                      1.0);
                    m_.push_coeff(
                        var(VarFamily::RawSupply, ee(leg.source, leg.tf, leg.product), t, -1),
                        -1.0);
                    m_.end_row();
                }
        for (auto& leg : inst_.raw_legs())
            for (int v : leg.vehicles)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::VehicleAggregation,
                                 ee(leg.source, leg.tf, leg.product, 5), v, k, Sense::Eq, 0.0);
                    for (int t = 1; t <= nt_; ++t)
                        m_.push_coeff(var(VarFamily::RawByVehicle,
                                          ee(leg.source, leg.tf, leg.product, v), t, k),
                                      1.0);
                    m_.push_coeff(var(VarFamily::RawSupplyByVehicle,
                                      ee(leg.source, leg.tf, leg.product, v), -1, -1),
                                  -1.0);
                    m_.end_row();
                }
    }

    // Fleet busy-hours budget per (region, vehicle, product) pool: round-trip
    // hours (unrounded, congestion-scaled) per kiloliter of capacity, against
    // the horizon times available-plus-hired tankers.
    void add_time_capacity() {
        for (auto& pool : inst_.pools()) {
            double vq = inst_.vehicles[pool.vehicle].capacity_kl;
            for (int k = 0; k < K(); ++k) {
                m_.begin_row(RowFamily::TimeCapacity, ee(pool.region, pool.vehicle, pool.product),
                             -1, k, Sense::Le,
                             double(nt_) * inst_.tanker_count(pool.region, pool.vehicle,
                                                              pool.product));
                for (auto& leg : inst_.consumer_legs()) {
                    if (leg.product != pool.product) continue;
                    if (!inst_.has_rvp(pool.region, pool.vehicle, pool.product)) continue;
                    if (!member_of(inst_.source_regions()[leg.source], pool.region)) continue;
                    if (!member_of(leg.vehicles, pool.vehicle)) continue;
                    double hours = round_trip_hours_consumer(inst_, leg.source, leg.consumer,
                                                             leg.product, pool.vehicle, level(k));
                    m_.push_coeff(var(VarFamily::DispatchByVehicle,
                                      ee(leg.source, leg.consumer, leg.product, pool.vehicle), -1,
                                      -1),
                                  hours / vq);
                }
                for (auto& leg : inst_.raw_legs()) {
                    if (leg.product != pool.product) continue;
                    if (!member_of(inst_.source_regions()[leg.source], pool.region)) continue;
                    if (!member_of(leg.vehicles, pool.vehicle)) continue;
                    double hours =
                        round_trip_hours_tf(inst_, leg.source, leg.tf, pool.vehicle, level(k));
                    m_.push_coeff(var(VarFamily::RawSupplyByVehicle,
                                      ee(leg.source, leg.tf, leg.product, pool.vehicle), -1, -1),
                                  hours / vq);
                }
                m_.push_coeff(var(VarFamily::ExtraTankerCapacity,
                                  ee(pool.region, pool.vehicle, pool.product), -1, -1),
                              -double(nt_) / vq);
                m_.end_row();
            }
        }
    }

    static bool member_of(const std::vector<int>& v, int x) {
        for (int e : v)
            if (e == x) return true;
        return false;
    }

    // Hourly capacity-pool recurrence: dispatched capacity leaves the pool at
    // the dispatch slot and returns when the round trip (in whole slots,
    // congestion-scaled) has elapsed; trips that would return past the
    // horizon never return. Slot 1 seats the initial pool of available plus
    // hired capacity.
    void add_tanker_flow() {
        for (auto& pool : inst_.pools()) {
            double vq = inst_.vehicles[pool.vehicle].capacity_kl;
            double initial = vq * inst_.tanker_count(pool.region, pool.vehicle, pool.product);
            for (int t = 1; t <= nt_; ++t)
                for (int k = 0; k < K(); ++k) {
                    m_.begin_row(RowFamily::TankerFlow, ee(pool.region, pool.vehicle, pool.product),
                                 t, k, Sense::Eq, t == 1 ? initial : 0.0);
                    m_.push_coeff(var(VarFamily::TankerPool,
                                      ee(pool.region, pool.vehicle, pool.product), t, k),
                                  1.0);
                    if (t == 1) {
                        m_.push_coeff(var(VarFamily::ExtraTankerCapacity,
                                          ee(pool.region, pool.vehicle, pool.product), -1, -1),
                                      -1.0);
                    } else {
                        m_.push_coeff(var(VarFamily::TankerPool,
                                          ee(pool.region, pool.vehicle, pool.product), t - 1, k),
                                      -1.0);
                    }
                    for (auto& leg : inst_.consumer_legs()) {
                        if (leg.product != pool.product) continue;
                        if (!member_of(inst_.source_regions()[leg.source], pool.region)) continue;
                        if (!member_of(leg.vehicles, pool.vehicle)) continue;
                        int col = var(VarFamily::DeliveryByVehicle,
                                      ee(leg.source, leg.consumer, leg.product, pool.vehicle), t,
                                      k);
                        m_.push_coeff(col, 1.0);
                        int rt = round_trip_slots_consumer(inst_, leg.source, leg.consumer,
                                                           leg.product, pool.vehicle, level(k));
                        if (t - rt >= 1)
                            m_.push_coeff(var(VarFamily::DeliveryByVehicle,
                                              ee(leg.source, leg.consumer, leg.product,
                                                 pool.vehicle),
                                              t - rt, k),
                                          -1.0);
                    }
                    for (auto& leg : inst_.raw_legs()) {
                        if (leg.product != pool.product) continue;
                        if (!member_of(inst_.source_regions()[leg.source], pool.region)) continue;
                        if (!member_of(leg.vehicles, pool.vehicle)) continue;
                        int col = var(VarFamily::RawByVehicle,
                                      ee(leg.source, leg.tf, leg.product, pool.vehicle), t, k);
                        m_.push_coeff(col, 1.0);
                        int rt = round_trip_slots_tf(inst_, leg.source, leg.tf, pool.vehicle,
                                                     level(k));
                        if (t - rt >= 1)
                            m_.push_coeff(var(VarFamily::RawByVehicle,
                                              ee(leg.source, leg.tf, leg.product, pool.vehicle),
                                              t - rt, k),
                                          -1.0);
                    }
                    m_.end_row();
                }
        }
    }

    // Minimized total expected operating cost: transport terms are
    // first-stage, penalty terms are probability-weighted recourse costs.
    void set_objective() {
        for (auto& leg : inst_.consumer_legs())
            for (int v : leg.vehicles) {
                double cost = inst_.lookup_hours(
                    inst_.cost_distribution, pack_key(leg.source, leg.consumer, leg.product, v),
                    "distribution cost");
                m_.add_objective("distribution",
                                 var(VarFamily::DispatchByVehicle,
                                     ee(leg.source, leg.consumer, leg.product, v), -1, -1),
                                 cost);
            }
        for (auto& leg : inst_.raw_legs())
            for (int v : leg.vehicles) {
                double cost = inst_.lookup_hours(inst_.cost_rw_supply,
                                                 pack_key(leg.source, leg.tf, leg.product, v),
                                                 "raw supply cost");
                m_.add_objective("rw_supply",
                                 var(VarFamily::RawSupplyByVehicle,
                                     ee(leg.source, leg.tf, leg.product, v), -1, -1),
                                 cost);
            }
        for (int k = 0; k < K(); ++k) {
            double pi = scen_.scenarios[k].probability;
            for (int idx : treated_cells_) {
                CellIdx c = cell(idx);
                auto it = inst_.cost_target_violation.find(pack_key(c.s, c.i, c.p));
                double cost = it == inst_.cost_target_violation.end() ? 0.0 : it->second;
                for (auto& [t, target] : c.cap->target_kl) {
                    if (target <= 0.0) continue;
                    m_.add_objective("target_penalty",
                                     var(VarFamily::TargetAbove, ee(c.s, c.i, c.p), t, k),
                                     pi * cost);
                    m_.add_objective("target_penalty",
                                     var(VarFamily::TargetBelow, ee(c.s, c.i, c.p), t, k),
                                     pi * cost);
                }
            }
            for (int idx : raw_cells_) {
                CellIdx c = cell(idx);
                auto it = inst_.cost_buffer_violation.find(pack_key(c.s, c.i, c.p));
                double cost = it == inst_.cost_buffer_violation.end() ? 0.0 : it->second;
                for (int t = 1; t <= nt_; ++t)
                    m_.add_objective("buffer_penalty",
                                     var(VarFamily::BufferViolation, ee(c.s, c.i, c.p), t, k),
                                     pi * cost);
            }
        }
        for (auto& pool : inst_.pools()) {
            auto it = inst_.cost_extra_tanker.find(pack_key(pool.vehicle, pool.product));
            double per_tanker = it == inst_.cost_extra_tanker.end() ? 0.0 : it->second;
            m_.add_objective("extra_tanker",
                             var(VarFamily::ExtraTankerCapacity,
                                 ee(pool.region, pool.vehicle, pool.product), -1, -1),
                             per_tanker / inst_.vehicles[pool.vehicle].capacity_kl);
        }
        const auto& cells = inst_.demand_cells();
        for (int k = 0; k < K(); ++k) {
            double pi = scen_.scenarios[k].probability;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const DemandCell& dc = cells[i];
                const DemandPenalty& q = inst_.demand_penalty[dc.product];
                m_.add_objective("surplus_penalty",
                                 var(VarFamily::DemandSurplus, ee(dc.consumer, dc.product),
                                     dc.slot, k),
                                 pi * q.surplus_per_kl);
                m_.add_objective("shortfall_penalty",
                                 var(VarFamily::DemandShortfall, ee(dc.consumer, dc.product),
                                     dc.slot, k),
                                 pi * q.shortfall_per_kl);
            }
        }
    }
};

}  // namespace

FirstStageValues extract_first_stage(const MilpModel& model, const std::vector<double>& x) {
    if (x.size() != model.vars.size())
        throw std::invalid_argument("extract_first_stage: assignment length mismatch");
    FirstStageValues out;
    for (int j = 0; j < model.num_vars(); ++j) {
        const MilpVar& v = model.vars[j];
        if (v.key.k >= 0) continue;  // second stage
        out.values[v.key] = x[j];
    }
    return out;
}

MilpModel build_tsr(const Instance& inst, const ScenarioSet& scen) {
    double total = 0.0;
    for (auto& s : scen.scenarios) total += s.probability;
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("model build: scenario probabilities must sum to 1");
    return Builder(inst, scen, false).build();
}

MilpModel build_dt(const Instance& inst, const Scenario& scenario) {
    ScenarioSet one;
    one.kind = scenario.congestion == CongestionLevel::Nominal ? ScenarioSet::Kind::DemandOnly
                                                               : ScenarioSet::Kind::Hybrid;
    one.generator_name = "fixed";
    one.scenarios.push_back(scenario);
    one.scenarios[0].id = 0;
    one.scenarios[0].probability = 1.0;
    return Builder(inst, one, true).build();
}

MilpModel build_ev(const Instance& inst, const ScenarioSet& scen, const FirstStageValues& fix) {
    MilpModel m = build_tsr(inst, scen);
    for (int j = 0; j < m.num_vars(); ++j) {
        const MilpVar& v = m.vars[j];
        if (v.key.k >= 0) continue;
        auto it = fix.values.find(v.key);
        if (it == fix.values.end())
            throw std::invalid_argument("build_ev: first-stage fix lacks a value for " +
                                        m.var_name(j));
        m.begin_row(RowFamily::FirstStageFix, v.key.e, v.key.t, -1, Sense::Eq, it->second);
        m.push_coeff(j, 1.0);
        m.end_row();
    }
    m.check_consistent();
    return m;
}

}  // namespace tanksched
