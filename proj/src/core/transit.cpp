#include "tanksched/core/transit.hpp"

#include <cmath>
#include <limits>

namespace tanksched {

namespace {

int ceil_slots(double hours) {
    int s = int(std::ceil(hours - 1e-9));
    return s < 1 ? 1 : s;
}

double disf_hours(const Instance& inst, int s, int v) {
    if (inst.sources[s].type != SourceType::FW) return 0.0;
    auto it = inst.disinfection_h.find(pack_key(s, v));
    return it == inst.disinfection_h.end() ? 0.0 : it->second;
}

}  // namespace

int transit_slots_consumer(const Instance& inst, int s, int c, int p, int v,
                           CongestionLevel level) {
    if (!inst.has_sp(s, p) || !inst.has_sc(s, c))
        throw std::out_of_range("transit: no suitability for leg " + inst.sources[s].id + "->" +
                                inst.consumers[c].id + " product " + inst.products[p].id);
    double travel =
        inst.lookup_hours(inst.travel_consumer_h, pack_key(s, c, p, v), "consumer travel time");
    double prep = inst.lookup_hours(inst.prep_h, pack_key(s, v), "preparation time");
    return ceil_slots(inst.multiplier(level) * travel + prep + disf_hours(inst, s, v));
}

int transit_slots_tf(const Instance& inst, int s, int tf, int v, CongestionLevel level) {
    if (!inst.has_ss(s, tf))
        throw std::out_of_range("transit: no raw-supply suitability for " + inst.sources[s].id +
                                "->" + inst.sources[tf].id);
    double travel = inst.lookup_hours(inst.travel_tf_h, pack_key(s, tf), "raw-supply travel time");
    double prep = inst.lookup_hours(inst.prep_h, pack_key(s, v), "preparation time");
    return ceil_slots(inst.multiplier(level) * travel + prep);
}

int arrival_lag_consumer(const Instance& inst, const Instance::ConsumerLeg& leg,
                         CongestionLevel level) {
    int best = std::numeric_limits<int>::max();
    for (int v : leg.vehicles)
        best = std::min(best, transit_slots_consumer(inst, leg.source, leg.consumer, leg.product,
                                                     v, level));
    if (best == std::numeric_limits<int>::max())
        throw std::out_of_range("transit: leg " + inst.sources[leg.source].id + "->" +
                                inst.consumers[leg.consumer].id + " has no compatible vehicle");
    return best;
}

int arrival_lag_tf(const Instance& inst, const Instance::RawLeg& leg, CongestionLevel level) {
    int best = std::numeric_limits<int>::max();
    for (int v : leg.vehicles)
        best = std::min(best, transit_slots_tf(inst, leg.source, leg.tf, v, level));
    if (best == std::numeric_limits<int>::max())
        throw std::out_of_range("transit: raw leg " + inst.sources[leg.source].id + "->" +
                                inst.sources[leg.tf].id + " has no compatible vehicle");
    return best;
}

double round_trip_hours_consumer(const Instance& inst, int s, int c, int p, int v,
                                 CongestionLevel level) {
    double travel =
        inst.lookup_hours(inst.travel_consumer_h, pack_key(s, c, p, v), "consumer travel time");
    double prep = inst.lookup_hours(inst.prep_h, pack_key(s, v), "preparation time");
    return 2.0 * inst.multiplier(level) * travel + prep + disf_hours(inst, s, v) +
           inst.consumers[c].distribution_time_h;
}

double round_trip_hours_tf(const Instance& inst, int s, int tf, int v, CongestionLevel level) {
    double travel = inst.lookup_hours(inst.travel_tf_h, pack_key(s, tf), "raw-supply travel time");
    double prep = inst.lookup_hours(inst.prep_h, pack_key(s, v), "preparation time");
    return 2.0 * inst.multiplier(level) * travel + prep;
}

int round_trip_slots_consumer(const Instance& inst, int s, int c, int p, int v,
                              CongestionLevel level) {
    return ceil_slots(round_trip_hours_consumer(inst, s, c, p, v, level));
}

int round_trip_slots_tf(const Instance& inst, int s, int tf, int v, CongestionLevel level) {
    return ceil_slots(round_trip_hours_tf(inst, s, tf, v, level));
}

}  // namespace tanksched
