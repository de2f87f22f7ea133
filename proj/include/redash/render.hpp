#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redash/model.hpp"

namespace redash {

/// Shortest decimal with at most 6 fractional digits; "-0" collapses to "0".
inline std::string format_number(double v) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite number cannot be serialized");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", quantize(v));
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

// ---------------------------------------------------------------------------
// Chart grammar (Vega-Lite) mapping for chart render specs

/// Config path each chart-applicable key owns inside a render spec. Shadow
/// keys have no chart-grammar equivalent and return an empty path.
inline std::vector<std::string> vega_path(Attr a) {
    switch (a) {
        case Attr::MarkFill: return {"config", "mark", "fill"};
        case Attr::MarkStroke: return {"config", "mark", "stroke"};
        case Attr::Background: return {"background"};
        case Attr::BorderWidth: return {"config", "view", "strokeWidth"};
        case Attr::BorderColor: return {"config", "view", "stroke"};
        case Attr::BorderRadius: return {"config", "view", "cornerRadius"};
        case Attr::GridVisible: return {"config", "axis", "grid"};
        case Attr::GridColor: return {"config", "axis", "gridColor"};
        case Attr::GridWidth: return {"config", "axis", "gridWidth"};
        case Attr::GridDash: return {"config", "axis", "gridDash"};
        case Attr::AxisDomainVisible: return {"config", "axis", "domain"};
        case Attr::AxisDomainColor: return {"config", "axis", "domainColor"};
        case Attr::AxisDomainWidth: return {"config", "axis", "domainWidth"};
        case Attr::TickVisible: return {"config", "axis", "ticks"};
        case Attr::TickSize: return {"config", "axis", "tickSize"};
        case Attr::TickColor: return {"config", "axis", "tickColor"};
        case Attr::TitleFontFamily: return {"config", "title", "font"};
        case Attr::TitleFontSize: return {"config", "title", "fontSize"};
        case Attr::TitleFontWeight: return {"config", "title", "fontWeight"};
        case Attr::BodyFontFamily: return {"config", "text", "font"};
        case Attr::BodyFontSize: return {"config", "text", "fontSize"};
        case Attr::BodyFontWeight: return {"config", "text", "fontWeight"};
        case Attr::AxisLabelFontFamily: return {"config", "axis", "labelFont"};
        case Attr::AxisLabelFontSize: return {"config", "axis", "labelFontSize"};
        case Attr::AxisLabelFontWeight: return {"config", "axis", "labelFontWeight"};
        case Attr::Padding: return {"padding"};
        default: return {};
    }
}

inline nlohmann::json vega_value(const AttributeValue& v) {
    return std::visit(
        [](const auto& x) -> nlohmann::json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HexColor>) return x.str();
            else if constexpr (std::is_same_v<T, Px> || std::is_same_v<T, Scalar>) return x.value;
            else if constexpr (std::is_same_v<T, FontWeight>) return x.value;
            else if constexpr (std::is_same_v<T, Token>) {
                if (x.value == "dashed") return nlohmann::json::array({4, 4});
                if (x.value == "dotted") return nlohmann::json::array({1, 3});
                return nlohmann::json::array();
            } else if constexpr (std::is_same_v<T, FontFamily>) return x.value;
            else return x;
        },
        v);
}

/// Rewrites the owned config paths of a chart's render spec from its style;
/// everything else in the blob is left alone. No-op without a render spec.
inline void sync_render_spec(Component& c) {
    if (!c.renderSpec || !c.renderSpec->is_object() || !c.kind.is_chart()) return;
    for (const auto& i : kVocabulary) {
        const auto path = vega_path(i.attr);
        if (path.empty()) continue;
        auto it = c.style.find(i.attr);
        nlohmann::json* node = &*c.renderSpec;
        if (it != c.style.end()) {
            for (std::size_t p = 0; p + 1 < path.size(); ++p) {
                auto& child = (*node)[path[p]];
                if (!child.is_object()) child = nlohmann::json::object();
                node = &child;
            }
            (*node)[path.back()] = vega_value(it->second);
        } else {
            bool reachable = true;
            for (std::size_t p = 0; p + 1 < path.size() && reachable; ++p) {
                auto f = node->find(path[p]);
                reachable = f != node->end() && f->is_object();
                if (reachable) node = &*f;
            }
            if (reachable) node->erase(path.back());
        }
    }
}

// ---------------------------------------------------------------------------
// CSS hints for non-chart components

inline std::string css_value(const AttributeValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HexColor>) return x.str();
            else if constexpr (std::is_same_v<T, Px> || std::is_same_v<T, Scalar>) return format_number(x.value) + "px";
            else if constexpr (std::is_same_v<T, FontWeight>) return std::to_string(x.value);
            else if constexpr (std::is_same_v<T, Token>) return x.value;
            else if constexpr (std::is_same_v<T, FontFamily>) return x.value;
            else return x ? "true" : "false";
        },
        v);
}

inline std::map<std::string, std::string> css_hints(const Component& c) {
    std::map<std::string, std::string> out;
    if (c.kind.is_chart()) return out;
    for (const auto& [k, v] : c.style)
        if (!info(k).css.empty()) out.emplace(std::string(info(k).css), css_value(v));
    return out;
}

}  // namespace redash
