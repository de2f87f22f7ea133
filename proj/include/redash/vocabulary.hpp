#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace redash {

enum class Family : std::uint8_t { Chart, BigNumber, Text, Image, FilterWidget, Container };

enum class ChartSubtype : std::uint8_t { Bar, Line, Area, Scatter, Pie, Table, Map, Other };

struct ComponentKind {
    Family family{Family::Text};
    std::optional<ChartSubtype> subtype;

    static ComponentKind chart(ChartSubtype s) { return {Family::Chart, s}; }
    static ComponentKind of(Family f) { return {f, std::nullopt}; }

    bool is_chart() const { return family == Family::Chart; }
    bool well_formed() const { return subtype.has_value() == is_chart(); }

    friend bool operator==(const ComponentKind&, const ComponentKind&) = default;
};

inline constexpr std::array<std::string_view, 6> kFamilyNames{
    "chart", "bigNumber", "text", "image", "filterWidget", "container"};
inline constexpr std::array<std::string_view, 8> kSubtypeNames{
    "bar", "line", "area", "scatter", "pie", "table", "map", "other"};

inline std::string_view to_string(Family f) { return kFamilyNames[static_cast<std::size_t>(f)]; }
inline std::string_view to_string(ChartSubtype s) { return kSubtypeNames[static_cast<std::size_t>(s)]; }

inline std::optional<Family> parse_family(std::string_view s) {
    for (std::size_t i = 0; i < kFamilyNames.size(); ++i)
        if (kFamilyNames[i] == s) return static_cast<Family>(i);
    return std::nullopt;
}

inline std::optional<ChartSubtype> parse_subtype(std::string_view s) {
    for (std::size_t i = 0; i < kSubtypeNames.size(); ++i)
        if (kSubtypeNames[i] == s) return static_cast<ChartSubtype>(i);
    return std::nullopt;
}

inline std::string describe(const ComponentKind& k) {
    std::string out{to_string(k.family)};
    if (k.subtype) {
        out += ':';
        out += to_string(*k.subtype);
    }
    return out;
}

enum class Category : std::uint8_t { Color, Lines, Text, Layout };

inline constexpr std::array<std::string_view, 4> kCategoryNames{"Color", "Lines", "Text", "Layout"};
inline std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

enum class ValueType : std::uint8_t { Color, LengthPx, Scalar, FontWeight, Token, FontFamily, Boolean };

// Closed attribute vocabulary, in vocabulary order. The enumerator order is
// load-bearing: feature lists and bundle key sets iterate it.
enum class Attr : std::uint8_t {
    MarkFill,
    MarkStroke,
    Background,
    ShadowColor,
    ShadowOffsetX,
    ShadowOffsetY,
    ShadowBlur,

    BorderWidth,
    BorderColor,
    BorderRadius,
    GridVisible,
    GridColor,
    GridWidth,
    GridDash,
    AxisDomainVisible,
    AxisDomainColor,
    AxisDomainWidth,
    TickVisible,
    TickSize,
    TickColor,

    TitleFontFamily,
    TitleFontSize,
    TitleFontWeight,
    BodyFontFamily,
    BodyFontSize,
    BodyFontWeight,
    AxisLabelFontFamily,
    AxisLabelFontSize,
    AxisLabelFontWeight,

    Padding,
};

inline constexpr std::size_t kAttrCount = 30;

struct AttrInfo {
    Attr attr;
    std::string_view key;
    Category category;
    ValueType type;
    bool chart_only;
    std::string_view feature;  // tooltip text
    std::string_view css;      // empty for chart-only keys
};

inline constexpr std::array<AttrInfo, kAttrCount> kVocabulary{{
    {Attr::MarkFill, "color.mark.fill", Category::Color, ValueType::Color, false, "mark fill color", "fill"},
    {Attr::MarkStroke, "color.mark.stroke", Category::Color, ValueType::Color, false, "mark stroke color", "stroke"},
    {Attr::Background, "color.background", Category::Color, ValueType::Color, false, "background color", "background-color"},
    {Attr::ShadowColor, "color.shadow.color", Category::Color, ValueType::Color, false, "shadow color", "--shadow-color"},
    {Attr::ShadowOffsetX, "color.shadow.offsetX", Category::Color, ValueType::Scalar, false, "shadow offset x", "--shadow-offset-x"},
    {Attr::ShadowOffsetY, "color.shadow.offsetY", Category::Color, ValueType::Scalar, false, "shadow offset y", "--shadow-offset-y"},
    {Attr::ShadowBlur, "color.shadow.blur", Category::Color, ValueType::LengthPx, false, "shadow blur", "--shadow-blur"},

    {Attr::BorderWidth, "line.border.width", Category::Lines, ValueType::LengthPx, false, "border width", "border-width"},
    {Attr::BorderColor, "line.border.color", Category::Lines, ValueType::Color, false, "border color", "border-color"},
    {Attr::BorderRadius, "line.border.radius", Category::Lines, ValueType::LengthPx, false, "border radius", "border-radius"},
    {Attr::GridVisible, "line.grid.visible", Category::Lines, ValueType::Boolean, true, "grid visibility", ""},
    {Attr::GridColor, "line.grid.color", Category::Lines, ValueType::Color, true, "grid color", ""},
    {Attr::GridWidth, "line.grid.width", Category::Lines, ValueType::LengthPx, true, "grid width", ""},
    {Attr::GridDash, "line.grid.dash", Category::Lines, ValueType::Token, true, "grid dash", ""},
    {Attr::AxisDomainVisible, "line.axis.domain.visible", Category::Lines, ValueType::Boolean, true, "axis line visibility", ""},
    {Attr::AxisDomainColor, "line.axis.domain.color", Category::Lines, ValueType::Color, true, "axis line color", ""},
    {Attr::AxisDomainWidth, "line.axis.domain.width", Category::Lines, ValueType::LengthPx, true, "axis line width", ""},
    {Attr::TickVisible, "line.tick.visible", Category::Lines, ValueType::Boolean, true, "tick visibility", ""},
    {Attr::TickSize, "line.tick.size", Category::Lines, ValueType::LengthPx, true, "tick size", ""},
    {Attr::TickColor, "line.tick.color", Category::Lines, ValueType::Color, true, "tick color", ""},

    {Attr::TitleFontFamily, "text.title.fontFamily", Category::Text, ValueType::FontFamily, false, "title font family", "--title-font-family"},
    {Attr::TitleFontSize, "text.title.fontSize", Category::Text, ValueType::LengthPx, false, "title font size", "--title-font-size"},
    {Attr::TitleFontWeight, "text.title.fontWeight", Category::Text, ValueType::FontWeight, false, "title font weight", "--title-font-weight"},
    {Attr::BodyFontFamily, "text.body.fontFamily", Category::Text, ValueType::FontFamily, false, "body font family", "font-family"},
    {Attr::BodyFontSize, "text.body.fontSize", Category::Text, ValueType::LengthPx, false, "body font size", "font-size"},
    {Attr::BodyFontWeight, "text.body.fontWeight", Category::Text, ValueType::FontWeight, false, "body font weight", "font-weight"},
    {Attr::AxisLabelFontFamily, "text.axisLabel.fontFamily", Category::Text, ValueType::FontFamily, true, "axis label font family", ""},
    {Attr::AxisLabelFontSize, "text.axisLabel.fontSize", Category::Text, ValueType::LengthPx, true, "axis label font size", ""},
    {Attr::AxisLabelFontWeight, "text.axisLabel.fontWeight", Category::Text, ValueType::FontWeight, true, "axis label font weight", ""},

    {Attr::Padding, "layout.padding", Category::Layout, ValueType::LengthPx, false, "spacing (padding)", "padding"},
}};

inline constexpr const AttrInfo& info(Attr a) { return kVocabulary[static_cast<std::size_t>(a)]; }
inline constexpr std::string_view key_name(Attr a) { return info(a).key; }
inline constexpr Category category_of(Attr a) { return info(a).category; }
inline constexpr ValueType value_type_of(Attr a) { return info(a).type; }

inline std::optional<Attr> parse_attr(std::string_view key) {
    for (const auto& i : kVocabulary)
        if (i.key == key) return i.attr;
    return std::nullopt;
}

inline bool applicable(Attr a, const ComponentKind& kind) {
    return !info(a).chart_only || kind.is_chart();
}

inline std::set<Attr> applicable_keys(const ComponentKind& kind) {
    std::set<Attr> out;
    for (const auto& i : kVocabulary)
        if (applicable(i.attr, kind)) out.insert(i.attr);
    return out;
}

inline constexpr std::array<std::string_view, 3> kDashTokens{"solid", "dashed", "dotted"};

// ---------------------------------------------------------------------------
// Design bundles

enum class BundleName : std::uint8_t { Color, Lines, Text, Layout, Style, All };

inline constexpr std::array<BundleName, 6> kAllBundles{
    BundleName::Color, BundleName::Lines, BundleName::Text,
    BundleName::Layout, BundleName::Style, BundleName::All};

inline constexpr std::array<std::string_view, 6> kBundleNames{
    "Color", "Lines", "Text", "Layout", "Style", "All"};

inline std::string_view to_string(BundleName b) { return kBundleNames[static_cast<std::size_t>(b)]; }

/// Case-insensitive, so the CLI accepts `--bundle color`.
inline std::optional<BundleName> parse_bundle(std::string_view s) {
    for (std::size_t i = 0; i < kBundleNames.size(); ++i) {
        const auto name = kBundleNames[i];
        if (name.size() != s.size()) continue;
        bool eq = true;
        for (std::size_t j = 0; j < s.size() && eq; ++j) {
            const char a = static_cast<char>(s[j] | 0x20);
            const char b = static_cast<char>(name[j] | 0x20);
            eq = a == b;
        }
        if (eq) return static_cast<BundleName>(i);
    }
    return std::nullopt;
}

inline bool bundle_covers(BundleName b, Category c) {
    switch (b) {
        case BundleName::Color: return c == Category::Color;
        case BundleName::Lines: return c == Category::Lines;
        case BundleName::Text: return c == Category::Text;
        case BundleName::Layout: return c == Category::Layout;
        case BundleName::Style: return c != Category::Layout;
        case BundleName::All: return true;
    }
    return false;
}

inline bool includes_geometry(BundleName b) { return b == BundleName::Layout || b == BundleName::All; }

inline std::set<Attr> bundle_keys(BundleName b) {
    std::set<Attr> out;
    for (const auto& i : kVocabulary)
        if (bundle_covers(b, i.category)) out.insert(i.attr);
    return out;
}

struct DesignBundle {
    BundleName name;
    std::set<Attr> keys;
    bool includesGeometry;

    static DesignBundle of(BundleName b) { return {b, bundle_keys(b), includes_geometry(b)}; }
};

inline constexpr std::array<std::string_view, 2> kGeometryFeatures{"relative size", "position"};

/// Tooltip feature names: category order, then vocabulary order. Layout lists
/// the geometry features ahead of padding.
inline std::vector<std::string> bundle_feature_list(BundleName b) {
    std::vector<std::string> out;
    for (Category c : {Category::Color, Category::Lines, Category::Text, Category::Layout}) {
        if (!bundle_covers(b, c)) continue;
        if (c == Category::Layout)
            for (auto g : kGeometryFeatures) out.emplace_back(g);
        for (const auto& i : kVocabulary)
            if (i.category == c) out.emplace_back(i.feature);
    }
    return out;
}

}  // namespace redash
