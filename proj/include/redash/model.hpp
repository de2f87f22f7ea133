#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "redash/errors.hpp"
#include "redash/time.hpp"
#include "redash/vocabulary.hpp"

namespace redash {

/// Numbers are stored on a 1e-6 grid so that canonical text round-trips
/// bit-exactly.
inline double quantize(double v) {
    if (!(std::abs(v) < 1e9)) return v;
    const double q = std::round(v * 1e6) / 1e6;
    return q == 0.0 ? 0.0 : q;  // no negative zero
}

// ---------------------------------------------------------------------------
// Attribute values

/// sRGB colour in canonical "#rrggbb" form. Only constructible through parse().
class HexColor {
public:
    static std::optional<HexColor> parse(std::string_view s) {
        if (s.size() != 7 || s[0] != '#') return std::nullopt;
        std::string out = "#";
        for (char c : s.substr(1)) {
            if (c >= 'A' && c <= 'F') c = static_cast<char>(c - 'A' + 'a');
            if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
            out += c;
        }
        return HexColor(std::move(out));
    }

    const std::string& str() const noexcept { return hex_; }

    friend bool operator==(const HexColor&, const HexColor&) = default;
    friend auto operator<=>(const HexColor&, const HexColor&) = default;

private:
    explicit HexColor(std::string hex) : hex_(std::move(hex)) {}
    std::string hex_;
};

struct Px {
    double value{0};
    friend bool operator==(const Px&, const Px&) = default;
    friend auto operator<=>(const Px&, const Px&) = default;
};

struct Scalar {
    double value{0};
    friend bool operator==(const Scalar&, const Scalar&) = default;
    friend auto operator<=>(const Scalar&, const Scalar&) = default;
};

struct FontWeight {
    int value{400};
    friend bool operator==(const FontWeight&, const FontWeight&) = default;
    friend auto operator<=>(const FontWeight&, const FontWeight&) = default;
};

struct Token {
    std::string value;
    friend bool operator==(const Token&, const Token&) = default;
    friend auto operator<=>(const Token&, const Token&) = default;
};

struct FontFamily {
    std::string value;
    friend bool operator==(const FontFamily&, const FontFamily&) = default;
    friend auto operator<=>(const FontFamily&, const FontFamily&) = default;
};

/// Alternative order mirrors ValueType.
using AttributeValue = std::variant<HexColor, Px, Scalar, FontWeight, Token, FontFamily, bool>;

inline ValueType type_of(const AttributeValue& v) { return static_cast<ValueType>(v.index()); }

/// Throws InvalidArgument on a malformed colour; for literals in code and tests.
inline HexColor color(std::string_view s) {
    auto c = HexColor::parse(s);
    if (!c) throw InvalidArgument("invalid color " + std::string(s));
    return *c;
}

/// Empty string when `v` is a legal value for `a`, else the violated rule.
inline std::string check_value(Attr a, const AttributeValue& v) {
    if (type_of(v) != value_type_of(a)) return "type mismatch";
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Px>) {
                if (!std::isfinite(x.value)) return "non-finite number";
                if (x.value < 0) return "negative length";
            } else if constexpr (std::is_same_v<T, Scalar>) {
                if (!std::isfinite(x.value)) return "non-finite number";
            } else if constexpr (std::is_same_v<T, FontWeight>) {
                if (x.value < 100 || x.value > 900 || x.value % 100 != 0) return "invalid font weight";
            } else if constexpr (std::is_same_v<T, Token>) {
                if (std::find(kDashTokens.begin(), kDashTokens.end(), x.value) == kDashTokens.end())
                    return "invalid token";
            } else if constexpr (std::is_same_v<T, FontFamily>) {
                if (x.value.empty()) return "empty font family";
            }
            return {};
        },
        v);
}

using StyleSpec = std::map<Attr, AttributeValue>;

inline StyleSpec restrict_to(const StyleSpec& spec, const std::set<Attr>& keys) {
    StyleSpec out;
    for (const auto& [k, v] : spec)
        if (keys.count(k)) out.emplace(k, v);
    return out;
}

// ---------------------------------------------------------------------------
// Document model

struct BoundingBox {
    double x{0};
    double y{0};
    double w{1};
    double h{1};

    double area() const { return w * h; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline constexpr double kBoxSlack = 1e-9;

/// Strictly positive intersection area.
inline bool overlaps(const BoundingBox& a, const BoundingBox& b, double eps = 1e-9) {
    const double ix = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    return ix > eps && iy > eps;
}

struct ProvenanceRecord {
    Attr attributeKey{};
    std::string referenceId;                      // empty for local edits
    std::optional<std::string> sourceComponentId;  // none = representative spec
    BundleName bundle{BundleName::All};
    Timestamp timestamp{};

    friend bool operator==(const ProvenanceRecord&, const ProvenanceRecord&) = default;
};

struct Component {
    std::string id;
    ComponentKind kind;
    BoundingBox bbox;
    StyleSpec style;
    std::optional<std::string> dataBinding;
    bool placeholder{false};
    std::set<Attr> locks;
    std::vector<ProvenanceRecord> provenance;
    /// Opaque declarative chart spec; only the config paths mapped from owned
    /// attribute keys are ever rewritten.
    std::optional<nlohmann::json> renderSpec;

    friend bool operator==(const Component&, const Component&) = default;
};

struct DashboardDoc {
    std::string id;
    std::string title;
    std::string author;
    double canvasAspect{16.0 / 9.0};
    std::vector<Component> components;
    std::int64_t revision{0};

    const Component* find(std::string_view cid) const {
        for (const auto& c : components)
            if (c.id == cid) return &c;
        return nullptr;
    }
    Component* find(std::string_view cid) {
        for (auto& c : components)
            if (c.id == cid) return &c;
        return nullptr;
    }

    friend bool operator==(const DashboardDoc&, const DashboardDoc&) = default;
};

// Reading order compares positions rounded to 2 decimals so visually aligned
// rows sort as rows.
inline std::tuple<long long, long long, std::string_view> reading_key(const Component& c) {
    return {std::llround(c.bbox.y * 100.0), std::llround(c.bbox.x * 100.0), c.id};
}

inline bool reading_less(const Component& a, const Component& b) {
    return reading_key(a) < reading_key(b);
}

inline void sort_reading_order(std::vector<Component>& cs) {
    std::stable_sort(cs.begin(), cs.end(), reading_less);
}

inline bool in_reading_order(const std::vector<Component>& cs) {
    return std::is_sorted(cs.begin(), cs.end(), reading_less);
}

}  // namespace redash
