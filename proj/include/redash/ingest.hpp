#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "redash/digest.hpp"
#include "redash/errors.hpp"
#include "redash/model.hpp"
#include "redash/serialize.hpp"
#include "redash/time.hpp"
#include "redash/validate.hpp"

namespace redash {

struct StructuredFileOrigin {
    friend bool operator==(const StructuredFileOrigin&, const StructuredFileOrigin&) = default;
};

struct ImageExtractionOrigin {
    std::string extractorId;
    std::string imageDigest;
    friend bool operator==(const ImageExtractionOrigin&, const ImageExtractionOrigin&) = default;
};

using Origin = std::variant<StructuredFileOrigin, ImageExtractionOrigin>;

struct ReferenceDesign {
    DashboardDoc doc;
    bool bookmarked{false};
    Origin origin{StructuredFileOrigin{}};
    Timestamp ingestedAt{};

    friend bool operator==(const ReferenceDesign&, const ReferenceDesign&) = default;
};

inline json origin_to_json(const Origin& o) {
    if (const auto* img = std::get_if<ImageExtractionOrigin>(&o))
        return {{"type", "imageExtraction"}, {"extractorId", img->extractorId}, {"imageDigest", img->imageDigest}};
    return {{"type", "structuredFile"}};
}

inline Origin origin_from_json(const json& j) {
    if (j.is_object() && j.value("type", "") == "imageExtraction")
        return ImageExtractionOrigin{j.value("extractorId", ""), j.value("imageDigest", "")};
    return StructuredFileOrigin{};
}

// ---------------------------------------------------------------------------
// normalize_style

struct StyleWarning {
    std::string key;
    std::string reason;  // "unknown key", "inapplicable", "invalid value", "clamped", "adjusted"
    std::string detail;

    friend bool operator==(const StyleWarning&, const StyleWarning&) = default;
};

inline std::string to_string(const StyleWarning& w) {
    std::string out = w.key + ": " + w.reason;
    if (!w.detail.empty()) out += " (" + w.detail + ")";
    return out;
}

struct NormalizedStyle {
    StyleSpec style;
    std::vector<StyleWarning> warnings;
    std::size_t adjusted{0};
};

namespace detail {

inline std::string trim_lower(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::string out;
    for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::optional<double> parse_decimal(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline constexpr double kMaxLength = 1e6;

inline std::optional<double> parse_length(std::string_view raw) {
    std::string s = trim_lower(raw);
    if (s.size() > 2 && s.ends_with("px")) s.resize(s.size() - 2);
    auto v = parse_decimal(s);
    if (v && std::abs(*v) > kMaxLength) return std::nullopt;
    return v;
}

}  // namespace detail

/// Keeps only vocabulary keys applicable to `kind` with type-valid values.
/// Colours are lowercased silently; negative lengths clamp to 0 and
/// off-grid font weights snap to the nearest hundred, each with a warning.
inline NormalizedStyle normalize_style(const std::map<std::string, std::string>& raw, const ComponentKind& kind) {
    NormalizedStyle out;
    for (const auto& [key, text] : raw) {
        auto attr = parse_attr(key);
        if (!attr) {
            out.warnings.push_back({key, "unknown key", ""});
            continue;
        }
        if (!applicable(*attr, kind)) {
            out.warnings.push_back({key, "inapplicable", describe(kind)});
            continue;
        }
        auto invalid = [&] { out.warnings.push_back({key, "invalid value", text}); };
        auto adjust = [&](const std::string& what) {
            out.warnings.push_back({key, what, text});
            ++out.adjusted;
        };
        switch (value_type_of(*attr)) {
            case ValueType::Color: {
                auto c = HexColor::parse(detail::trim_lower(text));
                if (!c) {
                    invalid();
                    break;
                }
                out.style.emplace(*attr, *c);
                break;
            }
            case ValueType::LengthPx: {
                auto v = detail::parse_length(text);
                if (!v) {
                    invalid();
                    break;
                }
                if (*v < 0) {
                    adjust("clamped");
                    v = 0.0;
                }
                out.style.emplace(*attr, Px{quantize(*v)});
                break;
            }
            case ValueType::Scalar: {
                auto v = detail::parse_length(text);
                if (!v) {
                    invalid();
                    break;
                }
                out.style.emplace(*attr, Scalar{quantize(*v)});
                break;
            }
            case ValueType::FontWeight: {
                const auto t = detail::trim_lower(text);
                std::optional<double> v;
                if (t == "normal") v = 400;
                else if (t == "bold") v = 700;
                else v = detail::parse_decimal(t);
                if (!v || *v < 1 || *v > 1000) {
                    invalid();
                    break;
                }
                int w = static_cast<int>(std::lround(*v / 100.0)) * 100;
                w = std::clamp(w, 100, 900);
                if (w != *v) adjust("adjusted");
                out.style.emplace(*attr, FontWeight{w});
                break;
            }
            case ValueType::Token: {
                auto t = detail::trim_lower(text);
                if (std::find(kDashTokens.begin(), kDashTokens.end(), t) == kDashTokens.end()) {
                    invalid();
                    break;
                }
                out.style.emplace(*attr, Token{t});
                break;
            }
            case ValueType::FontFamily: {
                std::string_view s = text;
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
                if (s.empty()) {
                    invalid();
                    break;
                }
                out.style.emplace(*attr, FontFamily{std::string(s)});
                break;
            }
            case ValueType::Boolean: {
                const auto t = detail::trim_lower(text);
                if (t == "true") out.style.emplace(*attr, true);
                else if (t == "false") out.style.emplace(*attr, false);
                else invalid();
                break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structured ingestion

/// Canonical order, locks/provenance/placeholder flags cleared.
inline DashboardDoc normalize_reference_doc(DashboardDoc doc) {
    for (auto& c : doc.components) {
        c.locks.clear();
        c.provenance.clear();
        c.placeholder = false;
    }
    sort_reading_order(doc.components);
    return doc;
}

inline ReferenceDesign ingest_document(std::string_view bytes, const Clock& clock = system_clock()) {
    auto doc = normalize_reference_doc(parse_doc(bytes));
    require_valid(doc);
    return ReferenceDesign{std::move(doc), false, StructuredFileOrigin{}, clock()};
}

// ---------------------------------------------------------------------------
// Image extraction through an external multimodal model

/// Machine-readable vocabulary sent along with every extraction request.
inline json schema_descriptor() {
    json keys = json::array();
    static constexpr std::array<std::string_view, 7> kTypeNames{
        "color", "length-px", "scalar", "fontWeight", "token", "fontFamily", "boolean"};
    for (const auto& i : kVocabulary) {
        json families = json::array();
        for (std::size_t f = 0; f < kFamilyNames.size(); ++f)
            if (!i.chart_only || static_cast<Family>(f) == Family::Chart) families.push_back(kFamilyNames[f]);
        json entry = {{"key", i.key},
                      {"category", to_string(i.category)},
                      {"type", kTypeNames[static_cast<std::size_t>(i.type)]},
                      {"families", families}};
        if (i.type == ValueType::Token) entry["values"] = kDashTokens;
        keys.push_back(std::move(entry));
    }
    return {{"families", kFamilyNames},
            {"chartSubtypes", kSubtypeNames},
            {"bbox", "fractions of canvas width/height: {x, y, w, h}"},
            {"keys", std::move(keys)}};
}

/// Response contract: JSON text, an array of {kind, bbox, attrs}. May throw
/// ExternalServiceError on transport failure; may return garbage.
class ExtractorClient {
public:
    virtual ~ExtractorClient() = default;
    virtual std::string id() const = 0;
    virtual std::string extract(std::span<const std::uint8_t> image, const json& schema) = 0;
};

struct ExtractionResult {
    ReferenceDesign design;
    std::vector<std::string> warnings;
    int retryCount{0};
};

struct ExtractionOptions {
    int maxRetries{2};
    double minSize{0.01};
    std::string title{"extracted reference"};
    std::string author;
};

namespace detail {

inline std::optional<double> finite_number(const json& j) {
    if (!j.is_number()) return std::nullopt;
    const double v = j.get<double>();
    return std::isfinite(v) ? std::optional(v) : std::nullopt;
}

inline std::optional<ComponentKind> extracted_kind(const json& j, std::vector<std::string>& warnings,
                                                   const std::string& where) {
    std::string family;
    std::string subtype;
    if (j.is_string()) family = j.get<std::string>();
    else if (j.is_object()) {
        if (auto f = j.find("family"); f != j.end() && f->is_string()) family = f->get<std::string>();
        if (auto s = j.find("chartSubtype"); s != j.end() && s->is_string()) subtype = s->get<std::string>();
    }
    auto fam = parse_family(family);
    if (!fam) {
        // bare chart subtype ("bar") is a common model shorthand
        if (auto st = parse_subtype(family)) return ComponentKind::chart(*st);
        warnings.push_back(where + ": dropped component with unknown kind");
        return std::nullopt;
    }
    ComponentKind k{*fam, std::nullopt};
    if (k.is_chart()) {
        auto st = parse_subtype(subtype);
        if (!st) {
            warnings.push_back(where + ": chart subtype '" + subtype + "' unknown, using 'other'");
            st = ChartSubtype::Other;
        }
        k.subtype = *st;
    } else if (!subtype.empty()) {
        warnings.push_back(where + ": ignored chartSubtype on non-chart");
    }
    return k;
}

/// Clamps into the unit square with at least `min_size` extent.
inline std::optional<BoundingBox> extracted_bbox(const json& j, double min_size, std::vector<std::string>& warnings,
                                                 const std::string& where) {
    if (!j.is_object()) {
        warnings.push_back(where + ": dropped component without bbox");
        return std::nullopt;
    }
    std::array<double, 4> v{};
    const std::array<const char*, 4> names{"x", "y", "w", "h"};
    for (std::size_t i = 0; i < 4; ++i) {
        auto it = j.find(names[i]);
        auto n = it == j.end() ? std::nullopt : finite_number(*it);
        if (!n) {
            warnings.push_back(where + ": dropped component with malformed bbox." + names[i]);
            return std::nullopt;
        }
        v[i] = *n;
    }
    BoundingBox b{v[0], v[1], v[2], v[3]};
    BoundingBox c = b;
    c.x = std::clamp(c.x, 0.0, 1.0 - min_size);
    c.y = std::clamp(c.y, 0.0, 1.0 - min_size);
    c.w = std::clamp(c.w, min_size, 1.0 - c.x);
    c.h = std::clamp(c.h, min_size, 1.0 - c.y);
    c = {quantize(c.x), quantize(c.y), quantize(c.w), quantize(c.h)};
    if (c.x + c.w > 1.0) c.w = quantize(1.0 - c.x);
    if (c.y + c.h > 1.0) c.h = quantize(1.0 - c.y);
    if (c != b) warnings.push_back(where + ": bbox clamped into canvas");
    return c;
}

inline std::map<std::string, std::string> extracted_attrs(const json& j, std::vector<std::string>& warnings,
                                                          const std::string& where) {
    std::map<std::string, std::string> raw;
    if (j.is_null()) return raw;
    if (!j.is_object()) {
        warnings.push_back(where + ": attrs is not an object, ignored");
        return raw;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& v = it.value();
        if (v.is_string()) raw[it.key()] = v.get<std::string>();
        else if (v.is_boolean()) raw[it.key()] = v.get<bool>() ? "true" : "false";
        else if (v.is_number()) raw[it.key()] = v.dump();
        else warnings.push_back(where + ": " + it.key() + ": invalid value (non-scalar)");
    }
    return raw;
}

}  // namespace detail

/// Turns one extractor response into a valid document; every dropped or
/// adjusted entry produces a warning. Throws ParseError when the response is
/// not a JSON array.
inline DashboardDoc doc_from_extraction(std::string_view response, const std::string& docId,
                                        const ExtractionOptions& opts, std::vector<std::string>& warnings) {
    json arr;
    try {
        arr = json::parse(response);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte, "");
    }
    if (!arr.is_array()) throw ParseError("extractor response is not an array", 0, "");
    DashboardDoc doc;
    doc.id = docId;
    doc.title = opts.title;
    doc.author = opts.author;
    std::size_t n = 0;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "component[" + std::to_string(i) + "]";
        const auto& item = arr[i];
        if (!item.is_object()) {
            warnings.push_back(where + ": dropped non-object entry");
            continue;
        }
        auto kind = detail::extracted_kind(item.contains("kind") ? item["kind"] : json(), warnings, where);
        if (!kind) continue;
        auto bbox = detail::extracted_bbox(item.contains("bbox") ? item["bbox"] : json(), opts.minSize, warnings, where);
        if (!bbox) continue;
        auto raw = detail::extracted_attrs(item.contains("attrs") ? item["attrs"] : json(), warnings, where);
        auto norm = normalize_style(raw, *kind);
        for (const auto& w : norm.warnings) warnings.push_back(where + ": " + to_string(w));
        Component c;
        c.id = "c" + std::to_string(++n);
        c.kind = *kind;
        c.bbox = *bbox;
        c.style = std::move(norm.style);
        doc.components.push_back(std::move(c));
    }
    sort_reading_order(doc.components);
    return doc;
}

/// Up to 1 + maxRetries attempts; a transport failure or an unparseable
/// response counts as a failed attempt.
inline ExtractionResult extract_from_image(std::span<const std::uint8_t> image, ExtractorClient& client,
                                           const ExtractionOptions& opts = {}, const Clock& clock = system_clock()) {
    if (image.empty()) throw InvalidArgument("empty image");
    const std::string digest = sha256_hex(image);
    const json schema = schema_descriptor();
    std::string lastFailure;
    bool lastWasTransport = false;
    for (int attempt = 0; attempt <= opts.maxRetries; ++attempt) {
        std::string response;
        try {
            response = client.extract(image, schema);
        } catch (const ExternalServiceError& e) {
            lastFailure = e.what();
            lastWasTransport = true;
            continue;
        }
        std::vector<std::string> warnings;
        DashboardDoc doc;
        try {
            doc = doc_from_extraction(response, "img-" + digest.substr(0, 16), opts, warnings);
        } catch (const ParseError& e) {
            lastFailure = e.what();
            lastWasTransport = false;
            continue;
        }
        if (doc.components.empty()) throw ExternalServiceError("extractor returned zero components");
        require_valid(doc);
        ReferenceDesign design{std::move(doc), false, ImageExtractionOrigin{client.id(), digest}, clock()};
        return {std::move(design), std::move(warnings), attempt};
    }
    if (lastWasTransport) throw ExternalServiceError("extractor transport failure: " + lastFailure);
    throw ExternalServiceError("extractor output unparseable after " + std::to_string(opts.maxRetries) +
                               " retries: " + lastFailure);
}

}  // namespace redash
