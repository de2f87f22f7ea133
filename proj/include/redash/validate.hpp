#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "redash/errors.hpp"
#include "redash/model.hpp"

namespace redash {

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline void validate_bbox(const Component& c, std::vector<Violation>& out) {
    const auto& b = c.bbox;
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
        out.push_back({c.id, "bbox", "non-finite bbox"});
        return;
    }
    if (b.x < 0 || b.y < 0) out.push_back({c.id, "bbox", "negative position"});
    if (b.w <= 0 || b.h <= 0) out.push_back({c.id, "bbox", "non-positive size"});
    if (b.x + b.w > 1 + kBoxSlack || b.y + b.h > 1 + kBoxSlack)
        out.push_back({c.id, "bbox", "bbox overflow"});
}

inline void validate_component(const Component& c, std::vector<Violation>& out) {
    if (c.id.empty()) out.push_back({c.id, "id", "empty id"});
    if (!c.kind.well_formed())
        out.push_back({c.id, "kind", c.kind.is_chart() ? "chart without subtype" : "subtype on non-chart"});
    validate_bbox(c, out);
    for (const auto& [k, v] : c.style) {
        const std::string field = "style." + std::string(key_name(k));
        if (!applicable(k, c.kind)) out.push_back({c.id, field, "inapplicable key"});
        if (auto rule = check_value(k, v); !rule.empty()) out.push_back({c.id, field, rule});
    }
    if (c.placeholder && c.dataBinding) out.push_back({c.id, "dataBinding", "placeholder with data binding"});
    for (Attr k : c.locks)
        if (!applicable(k, c.kind)) out.push_back({c.id, "locks." + std::string(key_name(k)), "inapplicable lock"});
}

/// Checks every document invariant; violations are data, never thrown.
inline ValidationReport validate_doc(const DashboardDoc& doc) {
    ValidationReport r;
    if (!(doc.canvasAspect > 0) || !std::isfinite(doc.canvasAspect))
        r.violations.push_back({"", "canvasAspect", "non-positive aspect"});
    if (doc.revision < 0) r.violations.push_back({"", "revision", "negative revision"});
    std::set<std::string> seen;
    for (const auto& c : doc.components) {
        if (!seen.insert(c.id).second) r.violations.push_back({c.id, "id", "duplicate id"});
        validate_component(c, r.violations);
    }
    if (!in_reading_order(doc.components)) r.violations.push_back({"", "components", "not in reading order"});
    return r;
}

inline void require_valid(const DashboardDoc& doc) {
    auto r = validate_doc(doc);
    if (!r.ok()) throw ValidationError(std::move(r.violations));
}

}  // namespace redash
