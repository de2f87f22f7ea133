#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "redash/errors.hpp"
#include "redash/model.hpp"
#include "redash/serialize.hpp"
#include "redash/validate.hpp"

namespace redash {

/// Undo-only document history for one canvas. The back of the stack is the
/// current document; the oldest entry is dropped past `capacity`.
class CanvasSession {
public:
    static constexpr std::size_t kDefaultCapacity = 50;

    CanvasSession(std::string canvasId, DashboardDoc initial, std::vector<Component> palette,
                  std::size_t capacity = kDefaultCapacity)
        : canvasId_(std::move(canvasId)), palette_(std::move(palette)), capacity_(capacity) {
        require_valid(initial);
        history_.push_back(std::move(initial));
    }

    const std::string& canvas_id() const { return canvasId_; }
    const DashboardDoc& current() const { return history_.back(); }
    const std::vector<Component>& palette() const { return palette_; }
    std::size_t depth() const { return history_.size(); }
    std::size_t capacity() const { return capacity_; }

    void push(DashboardDoc doc) {
        require_valid(doc);
        history_.push_back(std::move(doc));
        while (history_.size() > capacity_) history_.pop_front();
    }

    const DashboardDoc& undo() {
        if (history_.size() <= 1) throw Conflict("nothing to undo");
        history_.pop_back();
        return history_.back();
    }

private:
    std::string canvasId_;
    std::deque<DashboardDoc> history_;
    std::vector<Component> palette_;
    std::size_t capacity_;
};

// ---------------------------------------------------------------------------
// Component palette: pre-authored, data-bound, unstyled components.

inline std::vector<Component> default_palette() {
    struct Entry {
        const char* id;
        ComponentKind kind;
        const char* binding;
        BoundingBox bbox;
    };
    const Entry entries[] = {
        {"pal-bar-revenue", ComponentKind::chart(ChartSubtype::Bar), "sales.revenue_by_region", {0, 0, 0.5, 0.4}},
        {"pal-line-trend", ComponentKind::chart(ChartSubtype::Line), "sales.revenue_by_month", {0, 0, 0.5, 0.4}},
        {"pal-area-traffic", ComponentKind::chart(ChartSubtype::Area), "web.sessions_by_day", {0, 0, 0.5, 0.3}},
        {"pal-scatter-margin", ComponentKind::chart(ChartSubtype::Scatter), "sales.margin_vs_volume", {0, 0, 0.4, 0.4}},
        {"pal-pie-share", ComponentKind::chart(ChartSubtype::Pie), "sales.share_by_channel", {0, 0, 0.3, 0.3}},
        {"pal-table-orders", ComponentKind::chart(ChartSubtype::Table), "sales.recent_orders", {0, 0, 0.6, 0.4}},
        {"pal-map-stores", ComponentKind::chart(ChartSubtype::Map), "stores.locations", {0, 0, 0.5, 0.5}},
        {"pal-ban-total", ComponentKind::of(Family::BigNumber), "sales.total_revenue", {0, 0, 0.2, 0.15}},
        {"pal-filter-region", ComponentKind::of(Family::FilterWidget), "dim.region", {0, 0, 0.2, 0.1}},
        {"pal-text-notes", ComponentKind::of(Family::Text), "notes.summary", {0, 0, 0.4, 0.1}},
        {"pal-image-logo", ComponentKind::of(Family::Image), "assets.logo", {0, 0, 0.15, 0.1}},
    };
    std::vector<Component> out;
    for (const auto& e : entries) {
        Component c;
        c.id = e.id;
        c.kind = e.kind;
        c.dataBinding = e.binding;
        c.bbox = e.bbox;
        out.push_back(std::move(c));
    }
    return out;
}

inline json palette_to_json(const std::vector<Component>& palette) {
    json arr = json::array();
    for (const auto& c : palette) arr.push_back(component_to_json(c));
    return arr;
}

inline std::vector<Component> palette_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("palette must be an array", 0, "");
    std::vector<Component> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        auto c = component_from_json(j[i], "/" + std::to_string(i));
        std::vector<Violation> vs;
        validate_component(c, vs);
        if (!vs.empty()) throw ValidationError(std::move(vs));
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<Component> load_palette(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StorageError("cannot read palette " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return palette_from_json(parse_json(ss.str()));
}

}  // namespace redash
