#include "mbo/qlearn.hpp"

#include <json.hpp>

namespace mbo {

std::string QTable::to_json() const {
    nlohmann::json j;
    j["states"] = states_;
    j["actions"] = actions_;
    nlohmann::json rows = nlohmann::json::object();
    for (int s = 0; s < states_; ++s) {
        bool any = false;
        for (int a = 0; a < actions_; ++a)
            if (at(s, a) != 0.0) any = true;
        if (!any) continue;
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < actions_; ++a) row.push_back(at(s, a));
        rows[std::to_string(s)] = std::move(row);
    }
    j["q"] = std::move(rows);
    return j.dump(2);
}

QTable QTable::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    QTable t(j.at("states").get<int>(), j.at("actions").get<int>());
    for (const auto& [key, row] : j.at("q").items()) {
        const int s = std::stoi(key);
        if (static_cast<int>(row.size()) != t.actions())
            throw std::invalid_argument("QTable::from_json: row length mismatch");
        for (int a = 0; a < t.actions(); ++a) t.at(s, a) = row[static_cast<std::size_t>(a)];
    }
    return t;
}

} // namespace mbo
