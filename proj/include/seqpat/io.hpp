#pragma once

// JSON encodings of trained models and ranked pattern tables.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "core.hpp"
#include "model.hpp"
#include "report.hpp"

namespace seqpat {

inline constexpr const char* model_format = "seqpat-model/1";

/// Fingerprint of an alphabet's canonical CSV rendering.
inline std::string alphabet_hash(const EventAlphabet& alphabet) {
    std::ostringstream csv;
    write_alphabet(csv, alphabet);
    return hex64(fnv1a64(csv.str()));
}

/// Model document: format tag, alphabet hash, lambda, bias and one entry per
/// nonzero pattern. `extra` members are merged in at the top level.
inline nlohmann::ordered_json model_to_json(const PatternModel& model, const EventAlphabet& alphabet,
                                            const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
    nlohmann::ordered_json j;
    j["format"] = model_format;
    j["alphabet_hash"] = alphabet_hash(alphabet);
    j["lambda"] = model.lambda;
    j["bias"] = model.bias;
    auto& rows = j["patterns"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < model.patterns.size(); ++k) {
        nlohmann::ordered_json p;
        p["pattern"] = model.patterns[k].events;
        p["weight"] = model.weights[k];
        p["support"] = model.patterns[k].support;
        p["odds_ratio"] = std::exp(model.weights[k]);
        rows.push_back(std::move(p));
    }
    for (const auto& [key, value] : extra.items()) j[key] = value;
    return j;
}

inline PatternModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != model_format) throw std::runtime_error("not a seqpat model document");
    PatternModel m;
    m.lambda = j.at("lambda").get<double>();
    m.bias = j.at("bias").get<double>();
    for (const auto& p : j.at("patterns")) {
        m.patterns.push_back({p.at("pattern").get<EventList>(), p.at("support").get<std::size_t>()});
        m.weights.push_back(p.at("weight").get<double>());
    }
    return m;
}

inline PatternModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model '" + path + "'");
    try {
        return model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed model '" + path + "': " + e.what());
    }
}

inline nlohmann::ordered_json ranked_to_json(const std::vector<RankedPattern>& rows) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["pattern_ids"] = join_ids(r.pattern.events);
        j["description"] = r.description;
        j["support"] = r.pattern.support;
        j["weight"] = r.weight;
        j["odds_ratio"] = r.odds_ratio;
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace seqpat
