#include "tanksched/core/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tanksched {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    throw InstanceFormatError(path + ": " + msg);
}

int line_of_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

double num(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

std::string str(const ordered_json& j, const std::string& path) {
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

const ordered_json& member(const ordered_json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) bad(path, std::string("missing required field '") + key + "'");
    return *it;
}

int resolve(int idx, const std::string& id, const char* what, const std::string& path) {
    if (idx < 0) bad(path, std::string("unknown ") + what + " '" + id + "'");
    return idx;
}

// Reads rows of the form [id_a, id_b, ..., value] into a packed-key table.
template <class Resolver>
void read_table(const ordered_json& j, const std::string& path, int ids, Resolver res,
                std::unordered_map<std::uint64_t, double>& out) {
    if (j.is_null()) return;
    if (!j.is_array()) bad(path, "expected an array of rows");
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& row = j[i];
        std::string rp = path + "[" + std::to_string(i) + "]";
        if (!row.is_array() || int(row.size()) != ids + 1) bad(rp, "wrong row arity");
        std::uint64_t key = res(row, rp);
        out[key] = num(row[ids], rp);
    }
}

}  // namespace

Instance parse_instance(const std::string& text, const std::string& origin) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InstanceFormatError(origin + ":" + std::to_string(line_of_offset(text, e.byte)) +
                                  ": " + e.what());
    }
    Instance inst;
    inst.schema_version = int(num(member(j, "schema_version", origin), "schema_version"));
    if (inst.schema_version != 1)
        bad("schema_version", "unsupported version " + std::to_string(inst.schema_version));
    if (j.contains("name")) inst.name = str(j["name"], "name");
    inst.horizon_nt = int(num(member(j, "horizon_slots", origin), "horizon_slots"));
    if (j.contains("congestion_multiplier"))
        inst.congestion_multiplier = num(j["congestion_multiplier"], "congestion_multiplier");
    if (j.contains("demand_sigma")) inst.demand_sigma = num(j["demand_sigma"], "demand_sigma");

    for (auto& r : member(j, "regions", origin)) inst.regions.push_back(str(r, "regions"));

    for (auto& p : member(j, "products", origin)) {
        ProductDef d;
        d.id = str(member(p, "id", "products"), "products.id");
        d.is_raw = str(member(p, "kind", "products"), "products.kind") == "raw";
        if (p.contains("tf_only")) d.tf_only = p["tf_only"].get<bool>();
        inst.products.push_back(d);
    }
    for (auto& v : member(j, "vehicles", origin)) {
        VehicleDef d;
        d.id = str(member(v, "id", "vehicles"), "vehicles.id");
        d.capacity_kl = num(member(v, "capacity_kl", "vehicles"), "vehicles.capacity_kl");
        inst.vehicles.push_back(d);
    }
    for (auto& i : member(j, "inventories", origin))
        inst.inventories.push_back(str(i, "inventories"));

    for (auto& s : member(j, "sources", origin)) {
        SourceDef d;
        d.id = str(member(s, "id", "sources"), "sources.id");
        std::string path = "sources." + d.id;
        d.type = source_type_from_string(str(member(s, "type", path), path + ".type"));
        if (s.contains("max_extraction_kl_per_h"))
            d.max_extraction_kl_per_h = num(s["max_extraction_kl_per_h"], path);
        if (s.contains("throughput_kl_per_h"))
            d.throughput_kl_per_h = num(s["throughput_kl_per_h"], path);
        if (s.contains("min_uptime_h")) d.min_uptime_h = int(num(s["min_uptime_h"], path));
        if (s.contains("min_downtime_h")) d.min_downtime_h = int(num(s["min_downtime_h"], path));
        if (s.contains("initially_operating"))
            d.initially_operating = s["initially_operating"].get<bool>();
        if (s.contains("recovery"))
            for (auto& [pid, beta] : s["recovery"].items())
                d.recovery[pid] = num(beta, path + ".recovery." + pid);
        inst.sources.push_back(d);
    }
    for (auto& c : member(j, "consumers", origin)) {
        ConsumerDef d;
        d.id = str(member(c, "id", "consumers"), "consumers.id");
        d.region = str(member(c, "region", "consumers." + d.id), "consumers." + d.id + ".region");
        if (c.contains("distribution_time_h"))
            d.distribution_time_h = num(c["distribution_time_h"], "consumers." + d.id);
        inst.consumers.push_back(d);
    }

    if (j.contains("slot_bounds")) {
        for (auto& sb : j["slot_bounds"])
            inst.slot_bounds.emplace_back(num(sb[0], "slot_bounds"), num(sb[1], "slot_bounds"));
    }

    // finalize() builds the id->index maps needed to resolve relations.
    inst.finalize();

    auto S = [&](const ordered_json& v, const std::string& p) {
        auto id = str(v, p);
        return resolve(inst.try_source_index(id), id, "source", p);
    };
    auto C = [&](const ordered_json& v, const std::string& p) {
        auto id = str(v, p);
        return resolve(inst.try_consumer_index(id), id, "consumer", p);
    };
    auto P = [&](const ordered_json& v, const std::string& p) {
        auto id = str(v, p);
        return resolve(inst.try_product_index(id), id, "product", p);
    };
    auto V = [&](const ordered_json& v, const std::string& p) {
        auto id = str(v, p);
        return resolve(inst.try_vehicle_index(id), id, "vehicle", p);
    };
    auto R = [&](const ordered_json& v, const std::string& p) {
        auto id = str(v, p);
        return resolve(inst.try_region_index(id), id, "region", p);
    };
    auto I = [&](const ordered_json& v, const std::string& p) {
        auto id = str(v, p);
        return resolve(inst.try_inventory_index(id), id, "inventory", p);
    };

    const auto& su = member(j, "suitability", origin);
    for (auto& r : member(su, "source_product", "suitability"))
        inst.rel_source_product.emplace_back(S(r[0], "suitability.source_product"),
                                             P(r[1], "suitability.source_product"));
    for (auto& r : member(su, "source_consumer", "suitability"))
        inst.rel_source_consumer.emplace_back(S(r[0], "suitability.source_consumer"),
                                              C(r[1], "suitability.source_consumer"));
    if (su.contains("source_tf"))
        for (auto& r : su["source_tf"])
            inst.rel_source_tf.emplace_back(S(r[0], "suitability.source_tf"),
                                            S(r[1], "suitability.source_tf"));
    if (su.contains("source_tf_product"))
        for (auto& r : su["source_tf_product"])
            inst.rel_source_tf_product.emplace_back(S(r[0], "suitability.source_tf_product"),
                                                    S(r[1], "suitability.source_tf_product"),
                                                    P(r[2], "suitability.source_tf_product"));
    if (su.contains("source_tf_product_vehicle"))
        for (auto& r : su["source_tf_product_vehicle"])
            inst.rel_source_tf_product_vehicle.emplace_back(
                S(r[0], "suitability.source_tf_product_vehicle"),
                S(r[1], "suitability.source_tf_product_vehicle"),
                P(r[2], "suitability.source_tf_product_vehicle"),
                V(r[3], "suitability.source_tf_product_vehicle"));
    for (auto& r : member(su, "consumer_product_vehicle", "suitability"))
        inst.rel_consumer_product_vehicle.emplace_back(
            C(r[0], "suitability.consumer_product_vehicle"),
            P(r[1], "suitability.consumer_product_vehicle"),
            V(r[2], "suitability.consumer_product_vehicle"));
    for (auto& r : member(su, "region_source", "suitability"))
        inst.rel_region_source.emplace_back(R(r[0], "suitability.region_source"),
                                            S(r[1], "suitability.region_source"));
    for (auto& r : member(su, "region_vehicle_product", "suitability"))
        inst.rel_region_vehicle_product.emplace_back(R(r[0], "suitability.region_vehicle_product"),
                                                     V(r[1], "suitability.region_vehicle_product"),
                                                     P(r[2], "suitability.region_vehicle_product"));
    for (auto& r : member(su, "source_inventory_product", "suitability"))
        inst.rel_source_inventory_product.emplace_back(
            S(r[0], "suitability.source_inventory_product"),
            I(r[1], "suitability.source_inventory_product"),
            P(r[2], "suitability.source_inventory_product"));

    const auto& times = member(j, "times", origin);
    read_table(times.contains("prep_h") ? times["prep_h"] : ordered_json(), "times.prep_h", 2,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), V(row[1], p));
               },
               inst.prep_h);
    read_table(times.contains("disinfection_h") ? times["disinfection_h"] : ordered_json(),
               "times.disinfection_h", 2,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), V(row[1], p));
               },
               inst.disinfection_h);
    read_table(times.contains("travel_consumer_h") ? times["travel_consumer_h"] : ordered_json(),
               "times.travel_consumer_h", 4,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), C(row[1], p), P(row[2], p), V(row[3], p));
               },
               inst.travel_consumer_h);
    read_table(times.contains("travel_tf_h") ? times["travel_tf_h"] : ordered_json(),
               "times.travel_tf_h", 2,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), S(row[1], p));
               },
               inst.travel_tf_h);

    const auto& costs = member(j, "costs", origin);
    read_table(costs.contains("distribution_per_kl") ? costs["distribution_per_kl"]
                                                     : ordered_json(),
               "costs.distribution_per_kl", 4,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), C(row[1], p), P(row[2], p), V(row[3], p));
               },
               inst.cost_distribution);
    read_table(costs.contains("rw_supply_per_kl") ? costs["rw_supply_per_kl"] : ordered_json(),
               "costs.rw_supply_per_kl", 4,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), S(row[1], p), P(row[2], p), V(row[3], p));
               },
               inst.cost_rw_supply);
    read_table(costs.contains("target_violation_per_kl") ? costs["target_violation_per_kl"]
                                                         : ordered_json(),
               "costs.target_violation_per_kl", 3,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), I(row[1], p), P(row[2], p));
               },
               inst.cost_target_violation);
    read_table(costs.contains("buffer_violation_per_kl") ? costs["buffer_violation_per_kl"]
                                                         : ordered_json(),
               "costs.buffer_violation_per_kl", 3,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(S(row[0], p), I(row[1], p), P(row[2], p));
               },
               inst.cost_buffer_violation);
    read_table(costs.contains("extra_tanker_per_tanker") ? costs["extra_tanker_per_tanker"]
                                                         : ordered_json(),
               "costs.extra_tanker_per_tanker", 2,
               [&](const ordered_json& row, const std::string& p) {
                   return pack_key(V(row[0], p), P(row[1], p));
               },
               inst.cost_extra_tanker);

    inst.demand_penalty.assign(inst.products.size(), DemandPenalty{});
    if (costs.contains("demand_penalty")) {
        for (auto& row : costs["demand_penalty"]) {
            std::string p = "costs.demand_penalty";
            int pi = P(member(row, "product", p), p);
            inst.demand_penalty[pi].surplus_per_kl = num(member(row, "surplus_per_kl", p), p);
            inst.demand_penalty[pi].shortfall_per_kl = num(member(row, "shortfall_per_kl", p), p);
        }
    }

    if (j.contains("inventory_caps")) {
        for (auto& row : j["inventory_caps"]) {
            InventoryCap cap;
            std::string p = "inventory_caps";
            cap.source = str(member(row, "source", p), p);
            cap.inventory = str(member(row, "inventory", p), p);
            cap.product = str(member(row, "product", p), p);
            p += "[" + cap.source + "," + cap.inventory + "," + cap.product + "]";
            // Ids verified by the validator; the loader only requires presence.
            cap.min_kl = num(member(row, "min_kl", p), p);
            cap.max_kl = num(member(row, "max_kl", p), p);
            cap.buffer_kl = num(member(row, "buffer_kl", p), p);
            cap.initial_kl = num(member(row, "initial_kl", p), p);
            if (row.contains("target_kl"))
                for (auto& [slot, v] : row["target_kl"].items())
                    cap.target_kl[std::stoi(slot)] = num(v, p + ".target_kl");
            inst.inventory_caps.push_back(std::move(cap));
        }
    }

    if (j.contains("tanker_availability")) {
        for (auto& row : j["tanker_availability"]) {
            std::string p = "tanker_availability";
            inst.tanker_availability[pack_key(R(row[0], p), V(row[1], p), P(row[2], p))] =
                int(num(row[3], p));
        }
    }

    for (auto& row : member(j, "mean_demand_kl", origin)) {
        std::string p = "mean_demand_kl";
        int c = C(member(row, "consumer", p), p);
        int pi = P(member(row, "product", p), p);
        for (auto& [slot, v] : member(row, "slots", p).items()) {
            int t = std::stoi(slot);
            double de = num(v, p + ".slots");
            if (de > 0.0) inst.mean_demand[pack_key(c, pi, t)] = de;
        }
    }
    if (j.contains("demand_bounds_kl") && !j["demand_bounds_kl"].empty())
        inst.has_demand_bounds = true;

    inst.finalize();
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InstanceFormatError("cannot open instance file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str(), path);
}

std::string instance_to_json(const Instance& inst) {
    ordered_json j;
    j["schema_version"] = inst.schema_version;
    j["name"] = inst.name;
    j["horizon_slots"] = inst.horizon_nt;
    j["congestion_multiplier"] = inst.congestion_multiplier;
    j["demand_sigma"] = inst.demand_sigma;
    j["regions"] = inst.regions;
    j["products"] = ordered_json::array();
    for (auto& p : inst.products) {
        ordered_json row{{"id", p.id}, {"kind", p.is_raw ? "raw" : "final"}};
        if (p.tf_only) row["tf_only"] = true;
        j["products"].push_back(row);
    }
    j["vehicles"] = ordered_json::array();
    for (auto& v : inst.vehicles)
        j["vehicles"].push_back({{"id", v.id}, {"capacity_kl", v.capacity_kl}});
    j["inventories"] = inst.inventories;
    j["sources"] = ordered_json::array();
    for (auto& s : inst.sources) {
        ordered_json row{{"id", s.id}, {"type", to_string(s.type)}};
        if (s.type == SourceType::GW) row["max_extraction_kl_per_h"] = s.max_extraction_kl_per_h;
        if (s.type == SourceType::TF) {
            row["throughput_kl_per_h"] = s.throughput_kl_per_h;
            row["min_uptime_h"] = s.min_uptime_h;
            row["min_downtime_h"] = s.min_downtime_h;
            row["initially_operating"] = s.initially_operating;
            ordered_json rec;
            for (auto& [pid, beta] : s.recovery) rec[pid] = beta;
            row["recovery"] = rec;
        }
        j["sources"].push_back(row);
    }
    j["consumers"] = ordered_json::array();
    for (auto& c : inst.consumers)
        j["consumers"].push_back(
            {{"id", c.id}, {"region", c.region}, {"distribution_time_h", c.distribution_time_h}});

    ordered_json su;
    auto put2 = [&](const char* key, const std::vector<std::pair<int, int>>& rel, auto na,
                    auto nb) {
        su[key] = ordered_json::array();
        for (auto& [a, b] : rel) su[key].push_back({na(a), nb(b)});
    };
    auto sname = [&](int i) { return inst.sources[i].id; };
    auto cname = [&](int i) { return inst.consumers[i].id; };
    auto pname = [&](int i) { return inst.products[i].id; };
    auto vname = [&](int i) { return inst.vehicles[i].id; };
    auto rname = [&](int i) { return inst.regions[i]; };
    auto iname = [&](int i) { return inst.inventories[i]; };
    put2("source_product", inst.rel_source_product, sname, pname);
    put2("source_consumer", inst.rel_source_consumer, sname, cname);
    put2("source_tf", inst.rel_source_tf, sname, sname);
    su["source_tf_product"] = ordered_json::array();
    for (auto& [s, s2, p] : inst.rel_source_tf_product)
        su["source_tf_product"].push_back({sname(s), sname(s2), pname(p)});
    su["source_tf_product_vehicle"] = ordered_json::array();
    for (auto& [s, s2, p, v] : inst.rel_source_tf_product_vehicle)
        su["source_tf_product_vehicle"].push_back({sname(s), sname(s2), pname(p), vname(v)});
    su["consumer_product_vehicle"] = ordered_json::array();
    for (auto& [c, p, v] : inst.rel_consumer_product_vehicle)
        su["consumer_product_vehicle"].push_back({cname(c), pname(p), vname(v)});
    put2("region_source", inst.rel_region_source, rname, sname);
    su["region_vehicle_product"] = ordered_json::array();
    for (auto& [r, v, p] : inst.rel_region_vehicle_product)
        su["region_vehicle_product"].push_back({rname(r), vname(v), pname(p)});
    su["source_inventory_product"] = ordered_json::array();
    for (auto& [s, i, p] : inst.rel_source_inventory_product)
        su["source_inventory_product"].push_back({sname(s), iname(i), pname(p)});
    j["suitability"] = su;

    // Tables are emitted sorted by packed key so serialization is canonical.
    auto dump4 = [&](const std::unordered_map<std::uint64_t, double>& table, auto unpack) {
        std::vector<std::pair<std::uint64_t, double>> rows(table.begin(), table.end());
        std::sort(rows.begin(), rows.end());
        ordered_json arr = ordered_json::array();
        for (auto& [k, val] : rows) arr.push_back(unpack(k, val));
        return arr;
    };
    auto k0 = [](std::uint64_t k) { return int(std::int16_t(k >> 48)); };
    auto k1 = [](std::uint64_t k) { return int(std::int16_t(k >> 32)); };
    auto k2 = [](std::uint64_t k) { return int(std::int16_t(k >> 16)); };
    auto k3 = [](std::uint64_t k) { return int(std::int16_t(k)); };

    ordered_json times;
    times["prep_h"] = dump4(inst.prep_h, [&](std::uint64_t k, double v) {
        return ordered_json{sname(k0(k)), vname(k1(k)), v};
    });
    times["disinfection_h"] = dump4(inst.disinfection_h, [&](std::uint64_t k, double v) {
        return ordered_json{sname(k0(k)), vname(k1(k)), v};
    });
    times["travel_consumer_h"] = dump4(inst.travel_consumer_h, [&](std::uint64_t k, double v) {
        return ordered_json{sname(k0(k)), cname(k1(k)), pname(k2(k)), vname(k3(k)), v};
    });
    times["travel_tf_h"] = dump4(inst.travel_tf_h, [&](std::uint64_t k, double v) {
        return ordered_json{sname(k0(k)), sname(k1(k)), v};
    });
    j["times"] = times;

    ordered_json costs;
    costs["distribution_per_kl"] = dump4(inst.cost_distribution, [&](std::uint64_t k, double v) {
        return ordered_json{sname(k0(k)), cname(k1(k)), pname(k2(k)), vname(k3(k)), v};
    });
    costs["rw_supply_per_kl"] = dump4(inst.cost_rw_supply, [&](std::uint64_t k, double v) {
        return ordered_json{sname(k0(k)), sname(k1(k)), pname(k2(k)), vname(k3(k)), v};
    });
    costs["target_violation_per_kl"] =
        dump4(inst.cost_target_violation, [&](std::uint64_t k, double v) {
            return ordered_json{sname(k0(k)), iname(k1(k)), pname(k2(k)), v};
        });
    costs["buffer_violation_per_kl"] =
        dump4(inst.cost_buffer_violation, [&](std::uint64_t k, double v) {
            return ordered_json{sname(k0(k)), iname(k1(k)), pname(k2(k)), v};
        });
    costs["extra_tanker_per_tanker"] =
        dump4(inst.cost_extra_tanker, [&](std::uint64_t k, double v) {
            return ordered_json{vname(k0(k)), pname(k1(k)), v};
        });
    costs["demand_penalty"] = ordered_json::array();
    for (int p = 0; p < int(inst.products.size()); ++p) {
        if (inst.products[p].is_raw) continue;
        costs["demand_penalty"].push_back({{"product", pname(p)},
                                           {"surplus_per_kl", inst.demand_penalty[p].surplus_per_kl},
                                           {"shortfall_per_kl",
                                            inst.demand_penalty[p].shortfall_per_kl}});
    }
    j["costs"] = costs;

    j["inventory_caps"] = ordered_json::array();
    for (auto& cap : inst.inventory_caps) {
        ordered_json row{{"source", cap.source},   {"inventory", cap.inventory},
                         {"product", cap.product}, {"min_kl", cap.min_kl},
                         {"max_kl", cap.max_kl},   {"buffer_kl", cap.buffer_kl},
                         {"initial_kl", cap.initial_kl}};
        if (!cap.target_kl.empty()) {
            ordered_json targets;
            for (auto& [t, v] : cap.target_kl) targets[std::to_string(t)] = v;
            row["target_kl"] = targets;
        }
        j["inventory_caps"].push_back(row);
    }

    {
        std::vector<std::pair<std::uint64_t, int>> rows(inst.tanker_availability.begin(),
                                                        inst.tanker_availability.end());
        std::sort(rows.begin(), rows.end());
        j["tanker_availability"] = ordered_json::array();
        for (auto& [k, n] : rows)
            j["tanker_availability"].push_back({rname(k0(k)), vname(k1(k)), pname(k2(k)), n});
    }

    j["mean_demand_kl"] = ordered_json::array();
    for (int c = 0; c < int(inst.consumers.size()); ++c)
        for (int p = 0; p < int(inst.products.size()); ++p) {
            ordered_json slots;
            for (int t = 1; t <= inst.horizon_nt; ++t) {
                double de = inst.mean_demand_at(c, p, t);
                if (de > 0.0) slots[std::to_string(t)] = de;
            }
            if (!slots.empty())
                j["mean_demand_kl"].push_back(
                    {{"consumer", cname(c)}, {"product", pname(p)}, {"slots", slots}});
        }

    return j.dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InstanceFormatError("cannot write instance file '" + path + "'");
    out << instance_to_json(inst);
}

}  // namespace tanksched
