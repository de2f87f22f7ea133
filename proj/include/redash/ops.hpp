#pragma once

#include <optional>
#include <string>

#include "redash/catalog.hpp"
#include "redash/serialize.hpp"
#include "redash/transfer.hpp"

namespace redash {

// Request-level operations shared by the HTTP API and the CLI so both take
// the same engine path.

inline ApplyResult apply_from_catalog(const ReferenceStore& store, const DashboardDoc& canvas, const ReuseRequest& req,
                                      PairMerger* merger, Timestamp now) {
    const auto entry = store.get(req.referenceId);
    TransferOptions opts;
    opts.now = now;
    return apply_bundle(canvas, entry.design, req, merger, opts);
}

inline ReferenceLookup catalog_lookup(const ReferenceStore& store) {
    return [&store](const std::string& id) -> std::optional<ReferenceInfo> {
        auto e = store.find(id);
        if (!e) return std::nullopt;
        return ReferenceInfo{e->design.doc.title, e->design.doc.author};
    };
}

/// "ALL", a family name, a chart subtype name, or {family, chartSubtype?}.
inline KindScope scope_from_json(const json& j) {
    if (j.is_null()) return KindScope::all();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "ALL" || s == "all") return KindScope::all();
        if (auto f = parse_family(s)) return {*f, std::nullopt};
        if (auto st = parse_subtype(s)) return {Family::Chart, *st};
        throw ParseError("unknown scope '" + s + "'", 0, "/scope");
    }
    if (j.is_object()) {
        auto k = kind_from_json(j, "/scope");
        return {k.family, k.subtype};
    }
    throw ParseError("expected scope", 0, "/scope");
}

struct PropagateCommand {
    Attr key{};
    std::optional<AttributeValue> value;  // nullopt = REMOVE
    KindScope scope;
};

/// {key, value | "REMOVE", scope} or {key, remove: true, scope}.
inline PropagateCommand propagate_from_json(const json& j) {
    detail::require_object(j, "");
    PropagateCommand cmd;
    cmd.key = detail::get_attr(detail::get_string(detail::require(j, "key", ""), "/key"), "/key");
    const bool remove = j.value("remove", false) ||
                        (j.contains("value") && j["value"].is_string() && j["value"].get<std::string>() == "REMOVE");
    if (!remove) {
        const auto& v = detail::require(j, "value", "");
        try {
            cmd.value = value_from_json(cmd.key, v, "/value");
        } catch (const ParseError& e) {
            throw InvalidArgument(std::string("type mismatch for ") + std::string(key_name(cmd.key)) + ": " + e.what());
        }
    }
    cmd.scope = scope_from_json(j.value("scope", json()));
    return cmd;
}

/// Command-line text to a JSON literal: valid JSON as-is, anything else as a
/// string ("#ff0000", "Inter").
inline json literal_from_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

}  // namespace redash
