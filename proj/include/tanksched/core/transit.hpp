#pragma once

#include "tanksched/core/instance.hpp"

namespace tanksched {

// Transit/round-trip arithmetic. Deliveries are indexed by hourly slots, so
// one-way transits are rounded UP to whole slots and floored at one slot: a
// dispatch and its arrival never share a slot. The congestion multiplier
// scales only the travel component, never preparation/disinfection/
// distribution time.

// One-way source->consumer transit in slots for a specific vehicle.
// ceil(mult * travel + prep + disf), disinfection applying to FW sources only.
int transit_slots_consumer(const Instance& inst, int s, int c, int p, int v,
                           CongestionLevel level);

// One-way source->TF transit in slots: ceil(mult * travel + prep).
int transit_slots_tf(const Instance& inst, int s, int tf, int v, CongestionLevel level);

// Arrival lag used by the demand-balance and raw-inventory recurrences; the
// per-leg transit is vehicle independent there, so the earliest compatible
// vehicle's transit is used (legs normally carry one vehicle class anyway).
int arrival_lag_consumer(const Instance& inst, const Instance::ConsumerLeg& leg,
                         CongestionLevel level);
int arrival_lag_tf(const Instance& inst, const Instance::RawLeg& leg, CongestionLevel level);

// Round trips, unrounded hours: 2*mult*travel + prep (+ disf + distribution
// for consumer trips). Used by the fleet time-capacity budget.
double round_trip_hours_consumer(const Instance& inst, int s, int c, int p, int v,
                                 CongestionLevel level);
double round_trip_hours_tf(const Instance& inst, int s, int tf, int v, CongestionLevel level);

// Round trips in whole slots (ceil, floored at one): the slot at which a
// tanker dispatched at t is available again is t + round_trip_slots.
int round_trip_slots_consumer(const Instance& inst, int s, int c, int p, int v,
                              CongestionLevel level);
int round_trip_slots_tf(const Instance& inst, int s, int tf, int v, CongestionLevel level);

}  // namespace tanksched
