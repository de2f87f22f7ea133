#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "redash/errors.hpp"
#include "redash/ingest.hpp"
#include "redash/matching.hpp"
#include "redash/model.hpp"
#include "redash/render.hpp"
#include "redash/serialize.hpp"
#include "redash/validate.hpp"

namespace redash {

struct ReuseRequest {
    std::string referenceId;
    BundleName bundle{BundleName::All};
    Selection sourceSel{AllComponents{}};
    Selection targetSel{AllComponents{}};
    bool fillPlaceholders{false};
};

struct DroppedKey {
    std::string targetId;
    Attr key{};
    std::string reason;
    friend bool operator==(const DroppedKey&, const DroppedKey&) = default;
};

struct LockedSkip {
    std::string targetId;
    Attr key{};
    friend bool operator==(const LockedSkip&, const LockedSkip&) = default;
};

struct TransferReport {
    std::vector<MatchPair> pairs;
    std::set<std::string> representativeUsedFor;
    std::vector<std::string> placeholdersCreated;
    std::vector<DroppedKey> droppedKeys;
    std::vector<LockedSkip> lockedSkips;
    /// Targets whose external merge failed validation and fell back.
    std::vector<std::string> mergerFallbacks;
    std::vector<std::string> reflowed;
    bool canvasGrown{false};
};

/// Pluggable pair merge, typically an external model service. Returns the
/// merged attrs for the given key set as a JSON object keyed by attribute
/// name. Output is schema-checked; any failure falls back to the
/// deterministic merge.
class PairMerger {
public:
    virtual ~PairMerger() = default;
    virtual json merge(const StyleSpec& source, const StyleSpec& target, const std::set<Attr>& keys) = 0;
};

struct TransferOptions {
    Timestamp now{};
    /// Matched pairs scoring below this use the representative spec.
    double weakMatchThreshold{0.5};
    double reflowGap{0.02};
    /// Below this much free height the canvas grows instead of shrinking
    /// the re-flowed band.
    double minReflowBand{0.05};
    ScoreWeights weights{};
};

// ---------------------------------------------------------------------------
// Representative spec

/// Per-key mode over the sources that define the key; ties go to the value
/// whose first owner comes earliest in reading order.
inline StyleSpec representative_spec(const std::vector<Component>& sourcesIn, const std::set<Attr>& keys) {
    if (sourcesIn.empty()) throw InvalidArgument("empty source selection");
    auto sources = sourcesIn;
    sort_reading_order(sources);
    StyleSpec out;
    for (Attr k : keys) {
        // (value, count) in first-seen reading order
        std::vector<std::pair<AttributeValue, std::size_t>> tally;
        for (const auto& s : sources) {
            auto it = s.style.find(k);
            if (it == s.style.end()) continue;
            auto t = std::find_if(tally.begin(), tally.end(), [&](const auto& e) { return e.first == it->second; });
            if (t == tally.end()) tally.emplace_back(it->second, 1);
            else ++t->second;
        }
        if (tally.empty()) continue;
        const auto* best = &tally.front();
        for (const auto& e : tally)
            if (e.second > best->second) best = &e;
        out.emplace(k, best->first);
    }
    return out;
}

inline StyleSpec representative_spec(const std::vector<Component>& sources, BundleName bundle) {
    return representative_spec(sources, bundle_keys(bundle));
}

// ---------------------------------------------------------------------------
// Pairwise merge

struct MergeResult {
    StyleSpec style;
    std::vector<Attr> dropped;  // in keySet, defined by source, inapplicable to target
};

/// Target style overwritten by the source style restricted to keySet and the
/// target's applicable keys.
inline MergeResult deterministic_pair_merge(const Component& source, const Component& target,
                                            const std::set<Attr>& keySet) {
    MergeResult r{target.style, {}};
    for (const auto& [k, v] : source.style) {
        if (!keySet.count(k)) continue;
        if (!applicable(k, target.kind)) {
            r.dropped.push_back(k);
            continue;
        }
        r.style.insert_or_assign(k, v);
    }
    return r;
}

/// Schema-checks an external merge result: an object whose keys are in
/// keySet, applicable to the target, with valid values. nullopt on any
/// problem.
inline std::optional<StyleSpec> validate_merger_output(const json& out, const Component& target,
                                                       const std::set<Attr>& keySet) {
    if (!out.is_object()) return std::nullopt;
    StyleSpec spec;
    for (auto it = out.begin(); it != out.end(); ++it) {
        auto a = parse_attr(it.key());
        if (!a || !keySet.count(*a) || !applicable(*a, target.kind)) return std::nullopt;
        try {
            auto v = value_from_json(*a, it.value(), "/" + it.key());
            if (!check_value(*a, v).empty()) return std::nullopt;
            spec.emplace(*a, std::move(v));
        } catch (const ParseError&) {
            return std::nullopt;
        }
    }
    return spec;
}

namespace detail {

struct WriteContext {
    std::string referenceId;
    BundleName bundle;
    Timestamp now;
    TransferReport* report;
};

/// Writes `incoming` into `target`, honouring applicability and locks; one
/// provenance record per written key.
inline void write_style(Component& target, const StyleSpec& incoming, const std::optional<std::string>& sourceId,
                        const WriteContext& ctx) {
    for (const auto& [k, v] : incoming) {
        if (!applicable(k, target.kind)) {
            if (ctx.report) ctx.report->droppedKeys.push_back({target.id, k, "inapplicable"});
            continue;
        }
        if (target.locks.count(k)) {
            if (ctx.report) ctx.report->lockedSkips.push_back({target.id, k});
            continue;
        }
        target.style.insert_or_assign(k, v);
        target.provenance.push_back({k, ctx.referenceId, sourceId, ctx.bundle, ctx.now});
    }
}

inline std::size_t index_of(const DashboardDoc& doc, const std::string& id) {
    for (std::size_t i = 0; i < doc.components.size(); ++i)
        if (doc.components[i].id == id) return i;
    throw NotFound("unknown component id " + id);
}

inline std::string placeholder_id(const DashboardDoc& canvas, const std::string& referenceId,
                                  const std::string& sourceId) {
    const std::string base = "ph-" + referenceId.substr(0, 8) + "-" + sourceId;
    std::string id = base;
    for (int n = 2;; ++n) {
        const auto* existing = canvas.find(id);
        if (!existing || existing->placeholder) return id;
        id = base + "-" + std::to_string(n);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Layout transfer

struct LayoutResult {
    DashboardDoc doc;
    std::vector<std::string> placeholdersCreated;
    std::vector<std::string> reflowed;
    bool canvasGrown{false};
};

/// Matched targets take their source's box and padding; unmatched sources
/// optionally become placeholders; unmatched selected targets keep their
/// size and re-flow into rows below the transferred region.
inline LayoutResult transfer_layout(const DashboardDoc& canvas, const std::string& referenceId,
                                    const std::vector<Component>& sources, const std::vector<Component>& targets,
                                    const std::vector<MatchPair>& pairs, bool fillPlaceholders,
                                    BundleName bundle, const TransferOptions& opts,
                                    TransferReport* report = nullptr) {
    LayoutResult r{canvas, {}, {}, false};
    DashboardDoc& doc = r.doc;
    const detail::WriteContext ctx{referenceId, bundle, opts.now, report};

    std::map<std::string, const Component*> sourceById;
    for (const auto& s : sources) sourceById[s.id] = &s;
    std::set<std::string> matchedSources, matchedTargets;
    std::vector<BoundingBox> transferred;

    for (const auto& p : pairs) {
        const Component& src = *sourceById.at(p.sourceId);
        Component& tgt = doc.components[detail::index_of(doc, p.targetId)];
        tgt.bbox = src.bbox;
        if (auto it = src.style.find(Attr::Padding); it != src.style.end())
            detail::write_style(tgt, {{Attr::Padding, it->second}}, src.id, ctx);
        sync_render_spec(tgt);
        transferred.push_back(tgt.bbox);
        matchedSources.insert(p.sourceId);
        matchedTargets.insert(p.targetId);
    }

    if (fillPlaceholders) {
        for (const auto& s : sources) {
            if (matchedSources.count(s.id)) continue;
            const std::string id = detail::placeholder_id(doc, referenceId, s.id);
            Component* existing = doc.find(id);
            Component ph;
            if (existing) {
                ph = *existing;
                StyleSpec kept;
                for (Attr k : ph.locks)
                    if (auto it = ph.style.find(k); it != ph.style.end()) kept.emplace(k, it->second);
                ph.style = std::move(kept);
            }
            ph.id = id;
            ph.kind = s.kind;
            ph.bbox = s.bbox;
            ph.placeholder = true;
            ph.dataBinding.reset();
            ph.renderSpec = s.renderSpec;
            std::erase_if(ph.locks, [&](Attr k) { return !applicable(k, ph.kind); });
            detail::write_style(ph, s.style, s.id, ctx);
            sync_render_spec(ph);
            if (existing) *existing = std::move(ph);
            else doc.components.push_back(std::move(ph));
            r.placeholdersCreated.push_back(id);
            transferred.push_back(s.bbox);
        }
    }

    std::vector<std::string> unmatched;
    for (const auto& t : targets)  // already in reading order
        if (!matchedTargets.count(t.id)) unmatched.push_back(t.id);

    double regionBottom = 0;
    for (const auto& b : transferred) regionBottom = std::max(regionBottom, b.bottom());
    const double gap = opts.reflowGap;
    const double top = regionBottom + gap;

    // Targets already sitting clear below the region (say, from an earlier
    // apply of the same request) stay where they are.
    auto settled = [&] {
        for (const auto& id : unmatched) {
            const auto& b = doc.components[detail::index_of(doc, id)].bbox;
            if (b.y < top - kBoxSlack) return false;
            for (const auto& other : doc.components)
                if (other.id != id && overlaps(b, other.bbox)) return false;
        }
        return true;
    };

    if (!unmatched.empty() && !transferred.empty() && !settled()) {
        // Row packing at natural size.
        std::vector<BoundingBox> placed;
        double x = 0, rowTop = top, rowH = 0;
        for (const auto& id : unmatched) {
            const auto& b = doc.components[detail::index_of(doc, id)].bbox;
            if (x > 0 && x + b.w > 1.0 + kBoxSlack) {
                rowTop += rowH + gap;
                x = 0;
                rowH = 0;
            }
            placed.push_back({x, rowTop, b.w, b.h});
            x += b.w + gap;
            rowH = std::max(rowH, b.h);
        }
        const double bandBottom = rowTop + rowH;

        if (bandBottom <= 1.0 + kBoxSlack) {
            // fits
        } else if (1.0 - top >= opts.minReflowBand) {
            const double s = (1.0 - top) / (bandBottom - top);
            for (auto& b : placed) b = {b.x * s, top + (b.y - top) * s, b.w * s, b.h * s};
        } else {
            // Grow the canvas downward so the band fits; everything is
            // rescaled vertically and the aspect ratio shrinks accordingly.
            const double grow = bandBottom;
            for (auto& c : doc.components) {
                const double y0 = quantize(c.bbox.y / grow);
                const double y1 = quantize(c.bbox.bottom() / grow);
                c.bbox.y = y0;
                c.bbox.h = quantize(y1 - y0);
            }
            for (auto& b : placed) {
                const double y0 = b.y / grow;
                const double y1 = (b.y + b.h) / grow;
                b.y = y0;
                b.h = y1 - y0;
            }
            doc.canvasAspect = quantize(doc.canvasAspect / grow);
            r.canvasGrown = true;
        }
        for (std::size_t i = 0; i < unmatched.size(); ++i) {
            auto& c = doc.components[detail::index_of(doc, unmatched[i])];
            BoundingBox b{quantize(placed[i].x), quantize(placed[i].y), quantize(placed[i].w), quantize(placed[i].h)};
            if (b.x + b.w > 1.0) b.w = quantize(1.0 - b.x);
            if (b.y + b.h > 1.0) b.h = quantize(1.0 - b.y);
            c.bbox = b;
            r.reflowed.push_back(c.id);
        }
    }
    sort_reading_order(doc.components);
    return r;
}

// ---------------------------------------------------------------------------
// One-click bundle application

struct ApplyResult {
    DashboardDoc doc;
    TransferReport report;
};

/// Style merge for matched targets (external merger when configured and
/// valid, deterministic otherwise; weak matches use the representative
/// spec, judged at post-layout size for geometry bundles), representative
/// spec for unmatched targets, then layout transfer
/// when the bundle carries geometry. Locks are never overwritten; every
/// write gets a provenance record; revision increments by one.
inline ApplyResult apply_bundle(const DashboardDoc& canvas, const ReferenceDesign& reference, const ReuseRequest& req,
                                PairMerger* merger = nullptr, const TransferOptions& opts = {}) {
    require_valid(canvas);
    require_valid(reference.doc);
    const auto sources = resolve_selection(reference.doc, req.sourceSel);
    const auto targets = resolve_selection(canvas, req.targetSel);
    if (sources.empty()) throw InvalidArgument("empty source selection");

    ApplyResult r{canvas, {}};
    DashboardDoc& doc = r.doc;
    TransferReport& report = r.report;
    const auto keys = bundle_keys(req.bundle);
    const detail::WriteContext ctx{req.referenceId, req.bundle, opts.now, &report};

    report.pairs = match_components(sources, targets, opts.weights);
    const StyleSpec rep = representative_spec(sources, keys);

    std::map<std::string, const Component*> sourceById;
    for (const auto& s : sources) sourceById[s.id] = &s;
    std::set<std::string> matchedTargets;

    for (const auto& p : report.pairs) {
        matchedTargets.insert(p.targetId);
        Component& tgt = doc.components[detail::index_of(doc, p.targetId)];
        const Component& src = *sourceById.at(p.sourceId);
        // Under geometry bundles the target ends up with the source box, so
        // strength is judged at that final size.
        const double strength = includes_geometry(req.bundle)
                                    ? opts.weights.type * type_score(src.kind, tgt.kind, opts.weights) + opts.weights.size
                                    : p.score;
        if (strength < opts.weakMatchThreshold) {
            report.representativeUsedFor.insert(tgt.id);
            detail::write_style(tgt, rep, std::nullopt, ctx);
            sync_render_spec(tgt);
            continue;
        }
        std::optional<StyleSpec> incoming;
        if (merger) {
            try {
                incoming = validate_merger_output(merger->merge(src.style, tgt.style, keys), tgt, keys);
            } catch (const std::exception&) {
                incoming.reset();
            }
            if (!incoming) report.mergerFallbacks.push_back(tgt.id);
        }
        if (!incoming) incoming = restrict_to(src.style, keys);
        detail::write_style(tgt, *incoming, src.id, ctx);
        sync_render_spec(tgt);
    }

    for (const auto& t : targets) {
        if (matchedTargets.count(t.id)) continue;
        Component& tgt = doc.components[detail::index_of(doc, t.id)];
        report.representativeUsedFor.insert(tgt.id);
        detail::write_style(tgt, rep, std::nullopt, ctx);
        sync_render_spec(tgt);
    }

    if (includes_geometry(req.bundle)) {
        auto layout = transfer_layout(doc, req.referenceId, sources, targets, report.pairs, req.fillPlaceholders,
                                      req.bundle, opts, &report);
        doc = std::move(layout.doc);
        report.placeholdersCreated = std::move(layout.placeholdersCreated);
        report.reflowed = std::move(layout.reflowed);
        report.canvasGrown = layout.canvasGrown;
    }
    sort_reading_order(doc.components);
    doc.revision = canvas.revision + 1;
    return r;
}

// ---------------------------------------------------------------------------
// Wide propagation, locks, attribution

/// Family filter with an optional chart subtype; both empty means ALL.
struct KindScope {
    std::optional<Family> family;
    std::optional<ChartSubtype> subtype;

    static KindScope all() { return {}; }
    bool contains(const ComponentKind& k) const {
        if (family && k.family != *family) return false;
        if (subtype && k.subtype != subtype) return false;
        return true;
    }
};

inline BundleName category_bundle(Category c) { return static_cast<BundleName>(static_cast<int>(c)); }

/// Sets (or, with nullopt, removes) `key` on every in-scope component where
/// it applies and is not locked.
inline DashboardDoc propagate_attribute(const DashboardDoc& docIn, Attr key, const std::optional<AttributeValue>& value,
                                        const KindScope& scope, Timestamp now = {}) {
    if (value) {
        if (auto rule = check_value(key, *value); !rule.empty())
            throw InvalidArgument(std::string(key_name(key)) + ": " + rule);
    }
    DashboardDoc doc = docIn;
    for (auto& c : doc.components) {
        if (!scope.contains(c.kind) || !applicable(key, c.kind) || c.locks.count(key)) continue;
        if (value) {
            c.style.insert_or_assign(key, *value);
        } else {
            if (!c.style.erase(key)) continue;
        }
        c.provenance.push_back({key, "", std::nullopt, category_bundle(category_of(key)), now});
        sync_render_spec(c);
    }
    ++doc.revision;
    return doc;
}

inline DashboardDoc set_locks(const DashboardDoc& docIn, const std::string& componentId, const std::set<Attr>& keys) {
    DashboardDoc doc = docIn;
    Component* c = doc.find(componentId);
    if (!c) throw NotFound("unknown component id " + componentId);
    for (Attr k : keys)
        if (!applicable(k, c->kind))
            throw InvalidArgument("key " + std::string(key_name(k)) + " is inapplicable to " + describe(c->kind));
    c->locks = keys;
    ++doc.revision;
    return doc;
}

struct AttributionRow {
    Category category;
    std::string referenceId;
    std::string referenceTitle;
    std::string author;
    std::size_t attributeCount{0};

    friend bool operator==(const AttributionRow&, const AttributionRow&) = default;
};

struct ReferenceInfo {
    std::string title;
    std::string author;
};

using ReferenceLookup = std::function<std::optional<ReferenceInfo>(const std::string&)>;

/// Counts the attributes each reference currently supplies, by category:
/// only the latest provenance record per (component, key) is effective, and
/// local edits (empty reference id) credit nobody.
inline std::vector<AttributionRow> attribution_summary(const DashboardDoc& doc, const ReferenceLookup& lookup) {
    std::map<std::pair<Category, std::string>, std::size_t> counts;
    for (const auto& c : doc.components) {
        std::map<Attr, const ProvenanceRecord*> latest;
        for (const auto& p : c.provenance) latest[p.attributeKey] = &p;
        for (const auto& [k, p] : latest)
            if (!p->referenceId.empty()) ++counts[{category_of(k), p->referenceId}];
    }
    std::vector<AttributionRow> rows;
    for (const auto& [key, n] : counts) {
        AttributionRow row{key.first, key.second, key.second, "unknown", n};
        if (auto info = lookup ? lookup(key.second) : std::nullopt) {
            row.referenceTitle = info->title;
            row.author = info->author;
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const AttributionRow& a, const AttributionRow& b) {
        if (a.attributeCount != b.attributeCount) return a.attributeCount > b.attributeCount;
        if (a.referenceTitle != b.referenceTitle) return a.referenceTitle < b.referenceTitle;
        if (a.category != b.category) return a.category < b.category;
        return a.referenceId < b.referenceId;
    });
    return rows;
}

/// "Color inspired by Kevin (title, 5 attributes)"
inline std::string credit_line(const AttributionRow& r) {
    return std::string(to_string(r.category)) + " inspired by " + r.author + " (" + r.referenceTitle + ", " +
           std::to_string(r.attributeCount) + (r.attributeCount == 1 ? " attribute)" : " attributes)");
}

// ---------------------------------------------------------------------------
// Wire encoding for requests and reports

inline json selection_to_json(const Selection& s) {
    if (std::holds_alternative<AllComponents>(s)) return "ALL";
    return std::get<std::set<std::string>>(s);
}

inline Selection selection_from_json(const json& j, const std::string& path) {
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "ALL")) return AllComponents{};
    if (!j.is_array()) throw ParseError("expected \"ALL\" or an array of ids", 0, path);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.size(); ++i) ids.insert(detail::get_string(j[i], path + "/" + std::to_string(i)));
    return ids;
}

inline json request_to_json(const ReuseRequest& r) {
    return {{"referenceId", r.referenceId},
            {"bundle", to_string(r.bundle)},
            {"sources", selection_to_json(r.sourceSel)},
            {"targets", selection_to_json(r.targetSel)},
            {"fillPlaceholders", r.fillPlaceholders}};
}

inline ReuseRequest request_from_json(const json& j) {
    detail::require_object(j, "");
    ReuseRequest r;
    r.referenceId = detail::get_string(detail::require(j, "referenceId", ""), "/referenceId");
    auto b = parse_bundle(detail::get_string(detail::require(j, "bundle", ""), "/bundle"));
    if (!b) throw ParseError("unknown bundle", 0, "/bundle");
    r.bundle = *b;
    r.sourceSel = selection_from_json(j.value("sources", json()), "/sources");
    r.targetSel = selection_from_json(j.value("targets", json()), "/targets");
    if (j.contains("fillPlaceholders")) r.fillPlaceholders = detail::get_bool(j["fillPlaceholders"], "/fillPlaceholders");
    return r;
}

inline json report_to_json(const TransferReport& r) {
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"sourceId", p.sourceId}, {"targetId", p.targetId}, {"score", quantize(p.score)}});
    json dropped = json::array();
    for (const auto& d : r.droppedKeys)
        dropped.push_back({{"targetId", d.targetId}, {"key", key_name(d.key)}, {"reason", d.reason}});
    json locked = json::array();
    for (const auto& l : r.lockedSkips) locked.push_back({{"targetId", l.targetId}, {"key", key_name(l.key)}});
    return {{"pairs", pairs},
            {"representativeUsedFor", r.representativeUsedFor},
            {"placeholdersCreated", r.placeholdersCreated},
            {"droppedKeys", dropped},
            {"lockedSkips", locked},
            {"mergerFallbacks", r.mergerFallbacks},
            {"reflowed", r.reflowed},
            {"canvasGrown", r.canvasGrown}};
}

inline json attribution_to_json(const std::vector<AttributionRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"category", to_string(r.category)},
                       {"referenceId", r.referenceId},
                       {"referenceTitle", r.referenceTitle},
                       {"author", r.author},
                       {"attributeCount", r.attributeCount},
                       {"credit", credit_line(r)}});
    return out;
}

}  // namespace redash
