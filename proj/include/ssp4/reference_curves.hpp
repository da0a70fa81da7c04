/**
 * @file reference_curves.hpp
 * @brief Loader for the known superspecial curves shipped in data/.
 */
#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"

namespace ssp4 {

struct LabeledCurve {
    std::string label;
    CurveRecord rec;
};

/// Curves of one named set ("f5-dege", "f11-n1", ...), in label order as stored.
inline std::vector<LabeledCurve> load_reference_set(const std::string& path, const std::string& set) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    auto j = nlohmann::ordered_json::parse(in);
    auto& s = j.at("sets").at(set);
    std::vector<LabeledCurve> out;
    for (auto& [label, text] : s.at("curves").items()) {
        nlohmann::json c{{"case", s.at("case")}, {"p", s.at("q")}, {"P", text}};
        if (s.contains("eps")) c["eps"] = s.at("eps");
        out.push_back({label, curve_from_json(c)});
    }
    return out;
}

#ifdef SSP4_DATA_DIR
inline std::string default_reference_path() { return std::string(SSP4_DATA_DIR) + "/reference_curves.json"; }
inline std::vector<LabeledCurve> load_reference_set(const std::string& set) {
    return load_reference_set(default_reference_path(), set);
}
#endif

}  // namespace ssp4
