#include "quatsylv/json_io.hpp"

#include <fstream>
#include <sstream>

namespace quatsylv {

Json tensor_to_json(const QTensor& t) {
    Json j;
    j["shape"]["rows"] = t.shape().rows;
    j["shape"]["cols"] = t.shape().cols;
    Json data = Json::array();
    for (const auto& q : t.data()) data.push_back({q.w, q.x, q.y, q.z});
    j["data"] = std::move(data);
    return j;
}

QTensor tensor_from_json(const Json& j, const std::string& context) {
    try {
        if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
            throw ParseError(context + ": expected {shape, data}");
        Shape shape(j.at("shape").at("rows").get<Dims>(),
                    j.at("shape").at("cols").get<Dims>());
        const auto& data = j.at("data");
        if (!data.is_array())
            throw ParseError(context + ": data must be an array");
        std::vector<Quaternion> q;
        q.reserve(data.size());
        std::size_t idx = 0;
        for (const auto& e : data) {
            if (!e.is_array() || e.size() != 4)
                throw ParseError(context + ": data[" + std::to_string(idx) +
                                 "] must be [w,x,y,z]");
            Quaternion v(e[0].get<double>(), e[1].get<double>(), e[2].get<double>(),
                         e[3].get<double>());
            if (!(std::isfinite(v.w) && std::isfinite(v.x) && std::isfinite(v.y) &&
                  std::isfinite(v.z)))
                throw ParseError(context + ": data[" + std::to_string(idx) +
                                 "] is not finite");
            q.push_back(v);
            ++idx;
        }
        return QTensor(std::move(shape), std::move(q));
    } catch (const Json::exception& e) {
        throw ParseError(context + ": " + e.what());
    } catch (const ShapeMismatch& e) {
        throw ParseError(context + ": " + e.what());
    }
}

namespace {

std::vector<std::string> spec_slot_order(const SystemSpec& spec) {
    switch (spec.variant) {
        case Variant::single:
        case Variant::ax_yb: return {"A", "B", "E"};
        case Variant::two_term: return {"C3", "D3", "C4", "D4", "E"};
        case Variant::quad:
            return {"A1", "B1", "A2", "B2", "C3", "D3", "C4", "D4", "E"};
        case Variant::full: {
            std::vector<std::string> v;
            for (int i = 1; i <= 3; ++i)
                for (const char* n : {"A", "B", "C", "D", "F", "G", "H", "J"})
                    v.push_back(n + std::to_string(i));
            for (const char* n : {"F4", "G4", "H4", "J4", "E1", "E2", "E3", "E4", "E5"})
                v.push_back(n);
            return v;
        }
        case Variant::reduced: {
            std::vector<std::string> v;
            for (int i = 1; i <= 4; ++i)
                for (const char* n : {"F", "G", "H", "J"}) v.push_back(n + std::to_string(i));
            for (int i = 1; i <= 5; ++i) v.push_back("E" + std::to_string(i));
            return v;
        }
        case Variant::eta: {
            std::vector<std::string> v;
            for (int i = 1; i <= 4; ++i)
                for (const char* n : {"F", "H"}) v.push_back(n + std::to_string(i));
            for (int i = 1; i <= 5; ++i) v.push_back("E" + std::to_string(i));
            return v;
        }
    }
    return {};
}

}  // namespace

Json spec_to_json(const SystemSpec& spec) {
    Json j;
    j["variant"] = to_string(spec.variant);
    if (spec.variant == Variant::eta) j["eta"] = to_string(spec.eta);
    for (const auto& name : spec_slot_order(spec)) j[name] = tensor_to_json(spec.at(name));
    return j;
}

SystemSpec spec_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("variant"))
        throw ParseError("spec: missing variant");
    SystemSpec spec;
    try {
        spec.variant = variant_from_string(j.at("variant").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("spec: ") + e.what());
    }
    if (spec.variant == Variant::eta) {
        if (!j.contains("eta")) throw ParseError("spec: eta variant needs an eta axis");
        const std::string ax = j.at("eta").get<std::string>();
        if (ax == "i")
            spec.eta = EtaAxis::i;
        else if (ax == "j")
            spec.eta = EtaAxis::j;
        else if (ax == "k")
            spec.eta = EtaAxis::k;
        else
            throw ParseError("spec: eta axis must be i, j or k");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "variant" || it.key() == "eta") continue;
        spec.slots.emplace(it.key(), tensor_from_json(it.value(), "spec." + it.key()));
    }
    return spec;
}

Json solution_to_json(const Solution& sol) {
    Json j;
    for (const auto& [k, v] : sol.unknowns) j[k] = tensor_to_json(v);
    Json fp;
    fp["policy"] =
        sol.policy.policy == FreeParams::Policy::random ? "random" : "zero";
    if (sol.policy.policy == FreeParams::Policy::random) {
        fp["seed"] = sol.policy.seed;
        Json params;
        for (const auto& [name, t] : sol.free_params_used)
            params[name] = tensor_to_json(t);
        fp["params"] = std::move(params);
    }
    j["free_params_used"] = std::move(fp);
    return j;
}

Solution solution_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("solution: expected an object");
    Solution sol;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "free_params_used") {
            const auto& fp = it.value();
            if (fp.contains("policy") && fp.at("policy") == "random") {
                sol.policy.policy = FreeParams::Policy::random;
                if (fp.contains("seed")) sol.policy.seed = fp.at("seed").get<std::uint64_t>();
                if (fp.contains("params"))
                    for (auto p = fp.at("params").begin(); p != fp.at("params").end(); ++p)
                        sol.free_params_used.emplace_back(
                            p.key(), tensor_from_json(p.value(), "free_params." + p.key()));
            }
            continue;
        }
        sol.unknowns.emplace(it.key(), tensor_from_json(it.value(), "solution." + it.key()));
    }
    return sol;
}

Json report_to_json(const ConsistencyReport& rep) {
    Json j;
    j["overall"] = rep.overall;
    Json conds = Json::array();
    for (const auto& c : rep.conditions) {
        Json e;
        e["id"] = c.id;
        e["term"] = c.term;
        e["residual"] = c.residual;
        e["threshold"] = c.threshold;
        e["pass"] = c.pass;
        conds.push_back(std::move(e));
    }
    j["conditions"] = std::move(conds);
    return j;
}

std::string report_to_text(const ConsistencyReport& rep) {
    std::ostringstream os;
    for (const auto& c : rep.conditions) {
        os << (c.pass ? "PASS " : "FAIL ") << c.id << "  residual " << c.residual
           << "  threshold " << c.threshold << "  [" << c.term << "]\n";
    }
    os << (rep.overall ? "OVERALL PASS" : "OVERALL FAIL") << "\n";
    return os.str();
}

std::string canonical_dump(const Json& j) { return j.dump(1) + "\n"; }

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
}

}  // namespace quatsylv
