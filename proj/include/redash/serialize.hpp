#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "redash/errors.hpp"
#include "redash/model.hpp"
#include "redash/render.hpp"
#include "redash/time.hpp"

namespace redash {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Canonical JSON text: sorted object keys, no whitespace, numbers with at
// most 6 fractional digits.

inline void write_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: already sorted
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                write_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                write_canonical(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: out += format_number(j.get<double>()); break;
        case json::value_t::discarded: throw InvalidArgument("discarded json value");
        default: out += j.dump(); break;
    }
}

inline std::string canonical_dump(const json& j) {
    std::string out;
    write_canonical(j, out);
    return out;
}

/// Quantizes every float inside an opaque blob so the canonical text
/// round-trips.
inline void quantize_floats(json& j) {
    if (j.is_number_float()) j = quantize(j.get<double>());
    else if (j.is_structured())
        for (auto& child : j) quantize_floats(child);
}

// ---------------------------------------------------------------------------
// Encoding

inline json value_to_json(const AttributeValue& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, HexColor>) return x.str();
            else if constexpr (std::is_same_v<T, Px> || std::is_same_v<T, Scalar>) return quantize(x.value);
            else if constexpr (std::is_same_v<T, FontWeight>) return x.value;
            else if constexpr (std::is_same_v<T, Token> || std::is_same_v<T, FontFamily>) return x.value;
            else return x;
        },
        v);
}

inline json style_to_json(const StyleSpec& s) {
    json out = json::object();
    for (const auto& [k, v] : s) out[std::string(key_name(k))] = value_to_json(v);
    return out;
}

inline json kind_to_json(const ComponentKind& k) {
    json out = {{"family", to_string(k.family)}};
    if (k.subtype) out["chartSubtype"] = to_string(*k.subtype);
    return out;
}

inline json bbox_to_json(const BoundingBox& b) {
    return {{"x", quantize(b.x)}, {"y", quantize(b.y)}, {"w", quantize(b.w)}, {"h", quantize(b.h)}};
}

inline json provenance_to_json(const ProvenanceRecord& p) {
    return {{"attributeKey", key_name(p.attributeKey)},
            {"referenceId", p.referenceId},
            {"sourceComponentId", p.sourceComponentId ? json(*p.sourceComponentId) : json(nullptr)},
            {"bundle", to_string(p.bundle)},
            {"timestamp", format_iso8601(p.timestamp)}};
}

inline json component_to_json(const Component& c) {
    json out = {{"id", c.id},
                {"kind", kind_to_json(c.kind)},
                {"bbox", bbox_to_json(c.bbox)},
                {"style", style_to_json(c.style)},
                {"placeholder", c.placeholder}};
    if (c.dataBinding) out["dataBinding"] = *c.dataBinding;
    json locks = json::array();
    std::vector<std::string> names;
    for (Attr a : c.locks) names.emplace_back(key_name(a));
    std::sort(names.begin(), names.end());
    for (auto& n : names) locks.push_back(n);
    out["locks"] = std::move(locks);
    json prov = json::array();
    for (const auto& p : c.provenance) prov.push_back(provenance_to_json(p));
    out["provenance"] = std::move(prov);
    if (c.renderSpec) out["renderSpec"] = *c.renderSpec;
    if (!c.kind.is_chart()) out["cssHints"] = css_hints(c);
    return out;
}

inline json doc_to_json(const DashboardDoc& d) {
    json comps = json::array();
    for (const auto& c : d.components) comps.push_back(component_to_json(c));
    return {{"id", d.id},
            {"title", d.title},
            {"author", d.author},
            {"canvasAspect", quantize(d.canvasAspect)},
            {"revision", d.revision},
            {"components", std::move(comps)}};
}

inline std::string canonical_serialize(const DashboardDoc& d) { return canonical_dump(doc_to_json(d)); }

// ---------------------------------------------------------------------------
// Decoding. Structural problems throw ParseError with a JSON-pointer path;
// semantic problems are left to validate_doc.

namespace detail {

inline std::string child_path(const std::string& base, std::string_view key) {
    std::string out = base + "/";
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

inline const json& require(const json& obj, std::string_view key, const std::string& path) {
    auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ParseError("missing field '" + std::string(key) + "'", 0, path);
    return *it;
}

inline const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError("expected object", 0, path);
    return j;
}

inline std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError("expected string", 0, path);
    return j.get<std::string>();
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError("expected number", 0, path);
    return quantize(j.get<double>());
}

inline bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError("expected boolean", 0, path);
    return j.get<bool>();
}

inline Attr get_attr(const std::string& key, const std::string& path) {
    auto a = parse_attr(key);
    if (!a) throw ParseError("unknown attribute key '" + key + "'", 0, path);
    return *a;
}

}  // namespace detail

inline AttributeValue value_from_json(Attr a, const json& j, const std::string& path) {
    using namespace detail;
    switch (value_type_of(a)) {
        case ValueType::Color: {
            auto c = HexColor::parse(get_string(j, path));
            if (!c) throw ParseError("invalid color", 0, path);
            return *c;
        }
        case ValueType::LengthPx: return Px{get_number(j, path)};
        case ValueType::Scalar: return Scalar{get_number(j, path)};
        case ValueType::FontWeight: {
            const double v = get_number(j, path);
            if (v != std::floor(v) || std::abs(v) > 1e6) throw ParseError("expected integer", 0, path);
            return FontWeight{static_cast<int>(v)};
        }
        case ValueType::Token: return Token{get_string(j, path)};
        case ValueType::FontFamily: return FontFamily{get_string(j, path)};
        case ValueType::Boolean: return get_bool(j, path);
    }
    throw ParseError("unhandled value type", 0, path);
}

inline StyleSpec style_from_json(const json& j, const std::string& path) {
    detail::require_object(j, path);
    StyleSpec out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto p = detail::child_path(path, it.key());
        const Attr a = detail::get_attr(it.key(), p);
        out.emplace(a, value_from_json(a, it.value(), p));
    }
    return out;
}

inline ComponentKind kind_from_json(const json& j, const std::string& path) {
    using namespace detail;
    require_object(j, path);
    const auto fp = child_path(path, "family");
    auto family = parse_family(get_string(require(j, "family", path), fp));
    if (!family) throw ParseError("unknown family", 0, fp);
    ComponentKind k{*family, std::nullopt};
    if (auto it = j.find("chartSubtype"); it != j.end() && !it->is_null()) {
        const auto sp = child_path(path, "chartSubtype");
        auto st = parse_subtype(get_string(*it, sp));
        if (!st) throw ParseError("unknown chart subtype", 0, sp);
        k.subtype = *st;
    }
    return k;
}

inline BoundingBox bbox_from_json(const json& j, const std::string& path) {
    using namespace detail;
    require_object(j, path);
    BoundingBox b;
    b.x = get_number(require(j, "x", path), child_path(path, "x"));
    b.y = get_number(require(j, "y", path), child_path(path, "y"));
    b.w = get_number(require(j, "w", path), child_path(path, "w"));
    b.h = get_number(require(j, "h", path), child_path(path, "h"));
    return b;
}

inline ProvenanceRecord provenance_from_json(const json& j, const std::string& path) {
    using namespace detail;
    require_object(j, path);
    ProvenanceRecord p;
    const auto kp = child_path(path, "attributeKey");
    p.attributeKey = get_attr(get_string(require(j, "attributeKey", path), kp), kp);
    p.referenceId = get_string(require(j, "referenceId", path), child_path(path, "referenceId"));
    if (auto it = j.find("sourceComponentId"); it != j.end() && !it->is_null())
        p.sourceComponentId = get_string(*it, child_path(path, "sourceComponentId"));
    const auto bp = child_path(path, "bundle");
    auto b = parse_bundle(get_string(require(j, "bundle", path), bp));
    if (!b) throw ParseError("unknown bundle", 0, bp);
    p.bundle = *b;
    const auto tp = child_path(path, "timestamp");
    auto ts = parse_iso8601(get_string(require(j, "timestamp", path), tp));
    if (!ts) throw ParseError("invalid timestamp", 0, tp);
    p.timestamp = *ts;
    return p;
}

inline Component component_from_json(const json& j, const std::string& path) {
    using namespace detail;
    require_object(j, path);
    Component c;
    c.id = get_string(require(j, "id", path), child_path(path, "id"));
    c.kind = kind_from_json(require(j, "kind", path), child_path(path, "kind"));
    c.bbox = bbox_from_json(require(j, "bbox", path), child_path(path, "bbox"));
    if (auto it = j.find("style"); it != j.end()) c.style = style_from_json(*it, child_path(path, "style"));
    if (auto it = j.find("dataBinding"); it != j.end() && !it->is_null())
        c.dataBinding = get_string(*it, child_path(path, "dataBinding"));
    if (auto it = j.find("placeholder"); it != j.end()) c.placeholder = get_bool(*it, child_path(path, "placeholder"));
    if (auto it = j.find("locks"); it != j.end()) {
        const auto lp = child_path(path, "locks");
        if (!it->is_array()) throw ParseError("expected array", 0, lp);
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto ip = lp + "/" + std::to_string(i);
            c.locks.insert(get_attr(get_string((*it)[i], ip), ip));
        }
    }
    if (auto it = j.find("provenance"); it != j.end()) {
        const auto pp = child_path(path, "provenance");
        if (!it->is_array()) throw ParseError("expected array", 0, pp);
        for (std::size_t i = 0; i < it->size(); ++i)
            c.provenance.push_back(provenance_from_json((*it)[i], pp + "/" + std::to_string(i)));
    }
    if (auto it = j.find("renderSpec"); it != j.end() && !it->is_null()) {
        json spec = *it;
        quantize_floats(spec);
        c.renderSpec = std::move(spec);
    }
    return c;
}

inline DashboardDoc doc_from_json(const json& j) {
    using namespace detail;
    const std::string root;
    require_object(j, root);
    DashboardDoc d;
    d.id = get_string(require(j, "id", root), "/id");
    d.title = j.contains("title") ? get_string(j["title"], "/title") : std::string{};
    d.author = j.contains("author") ? get_string(j["author"], "/author") : std::string{};
    d.canvasAspect = get_number(require(j, "canvasAspect", root), "/canvasAspect");
    if (j.contains("revision")) {
        const auto& r = j["revision"];
        if (!r.is_number_integer()) throw ParseError("expected integer", 0, "/revision");
        d.revision = r.get<std::int64_t>();
    }
    const auto& comps = require(j, "components", root);
    if (!comps.is_array()) throw ParseError("expected array", 0, "/components");
    for (std::size_t i = 0; i < comps.size(); ++i)
        d.components.push_back(component_from_json(comps[i], "/components/" + std::to_string(i)));
    return d;
}

inline json parse_json(std::string_view bytes) {
    try {
        return json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte, "");
    }
}

/// Structural parse only; run validate_doc on the result.
inline DashboardDoc parse_doc(std::string_view bytes) { return doc_from_json(parse_json(bytes)); }

}  // namespace redash
