#pragma once

// JSON wire formats. Matrices are row-major arrays of arrays of integers;
// complex values are [re, im] pairs; decompositions are
// {"target": [[..]], "parts": [{"mult": m, "column": [..]}]}.

#include <json.hpp>

#include "thetaforms/decomp.hpp"
#include "thetaforms/intmat.hpp"
#include "thetaforms/util.hpp"

namespace thetaforms {

using json = nlohmann::json;

inline json to_json(const SymForm& t) {
    json rows = json::array();
    for (const auto& row : t.to_rows()) rows.push_back(row);
    return rows;
}

inline json to_json(const IntMat& m) {
    json rows = json::array();
    for (const auto& row : m.to_rows()) rows.push_back(row);
    return rows;
}

inline SymForm symform_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON must be a nonempty array of rows");
    std::vector<std::vector<Int>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw std::invalid_argument("matrix JSON rows must be arrays");
        std::vector<Int> r;
        for (const auto& x : row) {
            if (!x.is_number_integer()) throw std::invalid_argument("matrix JSON entries must be integers");
            r.push_back(x.get<Int>());
        }
        rows.push_back(std::move(r));
    }
    return SymForm::from_rows(rows);
}

inline json to_json(const Decomposition& d) {
    json parts = json::array();
    for (const auto& p : d.parts) parts.push_back({{"mult", p.mult}, {"column", p.column}});
    return json{{"target", to_json(d.target)}, {"parts", parts}};
}

inline Decomposition decomposition_from_json(const json& j) {
    Decomposition d;
    d.target = symform_from_json(j.at("target"));
    for (const auto& p : j.at("parts")) {
        Decomposition::Part part;
        part.mult = p.at("mult").get<Int>();
        for (const auto& x : p.at("column")) part.column.push_back(x.get<Int>());
        d.parts.push_back(std::move(part));
    }
    return d;
}

inline json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

}  // namespace thetaforms
