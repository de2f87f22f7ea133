// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "redash/redash.hpp"
#include "support/generators.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

using namespace redash;
using namespace redash::testing;

namespace {

// Pinned tolerances and trial counts.
constexpr double kTotalScoreTolerance = 1e-12;  // float summation order only
constexpr double kBboxTolerance = 1e-9;
constexpr int kClosureTrials = 200;
constexpr int kMatchingTrials = 500;
constexpr int kRepresentativeTrials = 500;
constexpr int kLayoutFixtures = 100;
constexpr int kCompositionFixtures = 100;
constexpr int kLockTrials = 200;
constexpr int kFuzzCases = 1000;
constexpr std::size_t kMinCorpus = 20;
constexpr double kTimeBudgetSeconds = 10.0;

const Timestamp kNow{std::chrono::milliseconds{1'760'000'000'000}};
const std::string kRefId = "5eed5eed00112233445566778899aabbccddeeff00112233445566778899aabb";

struct Outcome {
    bool pass{true};
    std::string detail;
};

struct Failures {
    std::size_t count{0};
    std::string first;
    void add(const std::string& what) {
        if (count++ == 0) first = what;
    }
    Outcome outcome(const std::string& okDetail) const {
        if (count == 0) return {true, okDetail};
        return {false, std::to_string(count) + " violation(s); first: " + first};
    }
};

TransferOptions options() {
    TransferOptions o;
    o.now = kNow;
    return o;
}

Selection random_selection(const DashboardDoc& d, Rng& rng, double pAll = 0.5) {
    std::uniform_real_distribution<double> u(0, 1);
    if (d.components.empty() || u(rng) < pAll) return select_all();
    std::set<std::string> ids;
    for (const auto& c : d.components)
        if (!c.placeholder && u(rng) < 0.6) ids.insert(c.id);
    if (ids.empty()) ids.insert(d.components.front().id);
    return select_ids(ids);
}

std::string value_text(const AttributeValue& v) { return canonical_dump(value_to_json(v)); }

// ---------------------------------------------------------------------------

Outcome bundle_partition() {
    // The key lists as published, kept here independently of the vocabulary table.
    const std::map<std::string, std::set<std::string>> listed{
        {"Color",
         {"color.mark.fill", "color.mark.stroke", "color.background", "color.shadow.color", "color.shadow.offsetX",
          "color.shadow.offsetY", "color.shadow.blur"}},
        {"Lines",
         {"line.border.width", "line.border.color", "line.border.radius", "line.grid.visible", "line.grid.color",
          "line.grid.width", "line.grid.dash", "line.axis.domain.visible", "line.axis.domain.color",
          "line.axis.domain.width", "line.tick.visible", "line.tick.size", "line.tick.color"}},
        {"Text",
         {"text.title.fontFamily", "text.title.fontSize", "text.title.fontWeight", "text.body.fontFamily",
          "text.body.fontSize", "text.body.fontWeight", "text.axisLabel.fontFamily", "text.axisLabel.fontSize",
          "text.axisLabel.fontWeight"}},
        {"Layout", {"layout.padding"}},
    };
    auto names = [](BundleName b) {
        std::set<std::string> out;
        for (Attr a : bundle_keys(b)) out.emplace(key_name(a));
        return out;
    };
    Failures f;
    const BundleName atomic[] = {BundleName::Color, BundleName::Lines, BundleName::Text, BundleName::Layout};
    for (BundleName b : atomic)
        if (names(b) != listed.at(std::string(to_string(b)))) f.add(std::string(to_string(b)) + " differs from list");
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            for (const auto& k : names(atomic[i]))
                if (names(atomic[j]).count(k)) f.add(k + " in two bundles");
    std::set<std::string> style, all;
    for (const char* b : {"Color", "Lines", "Text"}) style.insert(listed.at(b).begin(), listed.at(b).end());
    all = style;
    all.insert(listed.at("Layout").begin(), listed.at("Layout").end());
    if (names(BundleName::Style) != style) f.add("Style is not Color+Lines+Text");
    if (names(BundleName::All) != all) f.add("All is not Style+Layout");
    return f.outcome("4 disjoint bundles; Style = " + std::to_string(style.size()) + " keys, All = " +
                     std::to_string(all.size()) + " keys");
}

Outcome bundle_closure() {
    Rng rng(0xC105);
    Failures f;
    const BundleName choices[] = {BundleName::Color, BundleName::Lines, BundleName::Text};
    for (int trial = 0; trial < kClosureTrials; ++trial) {
        const auto canvasN = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
        const auto refN = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        auto canvas = random_doc("canvas", {.components = canvasN, .disjoint = trial % 2 == 0, .idPrefix = "t"}, rng);
        random_locks(canvas, rng, 0.15);
        const auto ref = as_reference(random_doc("ref", {.components = refN, .density = 0.7}, rng));
        ReuseRequest req;
        req.referenceId = kRefId;
        req.bundle = choices[trial % 3];
        req.sourceSel = random_selection(ref.doc, rng);
        req.targetSel = random_selection(canvas, rng);
        req.fillPlaceholders = trial % 4 == 0;
        const auto out = apply_bundle(canvas, ref, req, nullptr, options()).doc;
        const auto keys = bundle_keys(req.bundle);
        const std::string where = "trial " + std::to_string(trial) + " " + std::string(to_string(req.bundle));
        if (!validate_doc(out).ok()) f.add(where + ": invalid output");
        if (out.components.size() != canvas.components.size()) f.add(where + ": component set changed");
        for (const auto& before : canvas.components) {
            const auto* after = out.find(before.id);
            if (!after) {
                f.add(where + ": lost " + before.id);
                continue;
            }
            if (after->bbox != before.bbox) f.add(where + ": bbox of " + before.id + " changed");
            if (!(after->kind == before.kind) || after->dataBinding != before.dataBinding)
                f.add(where + ": identity of " + before.id + " changed");
            for (const auto& info : kVocabulary) {
                if (keys.count(info.attr)) continue;
                auto a = before.style.find(info.attr);
                auto b = after->style.find(info.attr);
                const bool same = (a == before.style.end()) == (b == after->style.end()) &&
                                  (a == before.style.end() || a->second == b->second);
                if (!same) f.add(where + ": " + before.id + " touched " + std::string(info.key));
            }
        }
    }
    return f.outcome(std::to_string(kClosureTrials) + " triples, 0 out-of-bundle changes");
}

Outcome matching_oracle() {
    Rng rng(0x3A7C);
    Failures f;
    double worst = 0;
    for (int trial = 0; trial < kMatchingTrials; ++trial) {
        const auto ns = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
        const auto nt = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
        const double chartShare = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
        auto src = random_doc("s", {.components = ns, .disjoint = trial % 3 != 0, .chartShare = chartShare}, rng);
        auto tgt = random_doc("t", {.components = nt, .disjoint = trial % 3 != 1, .chartShare = chartShare,
                                    .idPrefix = "t"},
                              rng);
        const auto pairs = match_components(src.components, tgt.components);
        const double expected = oracle::brute_force_best_total(src.components, tgt.components);
        const double got = total_score(pairs);
        worst = std::max(worst, std::abs(got - expected));
        if (std::abs(got - expected) > kTotalScoreTolerance)
            f.add("trial " + std::to_string(trial) + ": " + std::to_string(got) + " vs " + std::to_string(expected));
        std::set<std::string> usedS, usedT;
        for (const auto& p : pairs) {
            if (!usedS.insert(p.sourceId).second || !usedT.insert(p.targetId).second)
                f.add("trial " + std::to_string(trial) + ": id reused");
            if (!(p.score > 0)) f.add("trial " + std::to_string(trial) + ": zero-score pair");
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d instances, max |delta| = %.1e", kMatchingTrials, worst);
    return f.outcome(buf);
}

Outcome representative_oracle() {
    Rng rng(0x4E9);
    Failures f;
    std::size_t keysChecked = 0;
    for (int trial = 0; trial < kRepresentativeTrials; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
        const int pool = std::uniform_int_distribution<int>(1, 5)(rng);
        auto d = random_doc("r", {.components = n, .disjoint = trial % 2 == 0, .density = 0.6, .valuePool = pool}, rng);
        std::shuffle(d.components.begin(), d.components.end(), rng);
        const auto rep = representative_spec(d.components, BundleName::All);
        for (const auto& info : kVocabulary) {
            ++keysChecked;
            const auto expected = oracle::mode_value_text(d.components, info.attr);
            auto it = rep.find(info.attr);
            if ((it != rep.end()) != expected.has_value()) {
                f.add("trial " + std::to_string(trial) + ": presence of " + std::string(info.key));
                continue;
            }
            if (expected && value_text(it->second) != *expected)
                f.add("trial " + std::to_string(trial) + ": " + std::string(info.key) + " = " +
                      value_text(it->second) + ", oracle " + *expected);
        }
    }
    return f.outcome(std::to_string(kRepresentativeTrials) + " source sets, " + std::to_string(keysChecked) +
                     " keys equal");
}

/// Reference layouts leave at least a tenth of the canvas free below them so
/// re-flowed targets always fit without growing the canvas.
DashboardDoc layout_reference(Rng& rng, std::size_t n) {
    const double bottom = grid(std::uniform_real_distribution<double>(0.5, 0.9)(rng));
    return random_doc("ref", {.components = n, .density = 0.6, .bottom = bottom}, rng);
}

Outcome layout_fidelity() {
    Rng rng(0x1A70);
    Failures f;
    std::size_t placeholders = 0, reflowed = 0;
    for (int trial = 0; trial < kLayoutFixtures; ++trial) {
        const auto refDoc = layout_reference(rng, std::uniform_int_distribution<std::size_t>(1, 10)(rng));
        const auto ref = as_reference(refDoc);
        const auto canvas = random_doc(
            "canvas", {.components = std::uniform_int_distribution<std::size_t>(0, 10)(rng), .idPrefix = "t"}, rng);
        ReuseRequest req;
        req.referenceId = kRefId;
        req.bundle = trial % 2 == 0 ? BundleName::Layout : BundleName::All;
        req.fillPlaceholders = trial % 5 != 4;
        const std::string where = "fixture " + std::to_string(trial);
        if (!pairwise_disjoint([&] {
                std::vector<BoundingBox> b;
                for (const auto& c : refDoc.components) b.push_back(c.bbox);
                return b;
            }())) {
            f.add(where + ": generator produced overlapping sources");
            continue;
        }
        const auto r = apply_bundle(canvas, ref, req, nullptr, options());
        if (!validate_doc(r.doc).ok()) f.add(where + ": invalid output");
        for (const auto& p : r.report.pairs) {
            const auto& s = refDoc.find(p.sourceId)->bbox;
            const auto& t = r.doc.find(p.targetId)->bbox;
            if (std::abs(s.x - t.x) > kBboxTolerance || std::abs(s.y - t.y) > kBboxTolerance ||
                std::abs(s.w - t.w) > kBboxTolerance || std::abs(s.h - t.h) > kBboxTolerance)
                f.add(where + ": " + p.targetId + " bbox differs from " + p.sourceId);
        }
        const std::size_t expectedPh = req.fillPlaceholders ? refDoc.components.size() - r.report.pairs.size() : 0;
        if (r.report.placeholdersCreated.size() != expectedPh)
            f.add(where + ": " + std::to_string(r.report.placeholdersCreated.size()) + " placeholders, expected " +
                  std::to_string(expectedPh));
        std::vector<BoundingBox> boxes;
        for (const auto& c : r.doc.components) boxes.push_back(c.bbox);
        if (!pairwise_disjoint(boxes)) f.add(where + ": overlap after transfer");
        if (r.report.canvasGrown) f.add(where + ": canvas grew");
        placeholders += r.report.placeholdersCreated.size();
        reflowed += r.report.reflowed.size();
    }
    return f.outcome(std::to_string(kLayoutFixtures) + " fixtures, " + std::to_string(placeholders) +
                     " placeholders, " + std::to_string(reflowed) + " re-flowed targets, no overlap");
}

Outcome composition_idempotence() {
    Rng rng(0xC0DE);
    Failures f;
    for (int trial = 0; trial < kCompositionFixtures; ++trial) {
        const auto ref = as_reference(layout_reference(rng, std::uniform_int_distribution<std::size_t>(1, 8)(rng)));
        auto canvas = random_doc(
            "canvas", {.components = std::uniform_int_distribution<std::size_t>(0, 8)(rng), .idPrefix = "t"}, rng);
        random_locks(canvas, rng, 0.1);
        ReuseRequest req;
        req.referenceId = kRefId;
        req.sourceSel = random_selection(ref.doc, rng, 0.7);
        req.targetSel = random_selection(canvas, rng, 0.7);
        req.fillPlaceholders = trial % 2 == 0;
        const std::string where = "fixture " + std::to_string(trial);

        req.bundle = BundleName::All;
        const auto all = apply_bundle(canvas, ref, req, nullptr, options()).doc;
        req.bundle = BundleName::Layout;
        const auto laid = apply_bundle(canvas, ref, req, nullptr, options()).doc;
        req.bundle = BundleName::Style;
        const auto composed = apply_bundle(laid, ref, req, nullptr, options()).doc;
        if (strip_metadata(all) != strip_metadata(composed)) f.add(where + ": All != Style after Layout");

        for (BundleName b : kAllBundles) {
            req.bundle = b;
            const auto once = apply_bundle(canvas, ref, req, nullptr, options()).doc;
            const auto twice = apply_bundle(once, ref, req, nullptr, options()).doc;
            if (strip_metadata(once) != strip_metadata(twice))
                f.add(where + ": " + std::string(to_string(b)) + " twice != once");
        }
    }
    return f.outcome(std::to_string(kCompositionFixtures) + " fixtures; composition and idempotence for all 6 bundles");
}

Outcome lock_inviolability() {
    Rng rng(0x10C);
    Failures f;
    std::size_t locksChecked = 0;
    auto check = [&](const DashboardDoc& before, const DashboardDoc& after, const std::string& where) {
        for (const auto& c : before.components) {
            const auto* a = after.find(c.id);
            if (!a) continue;
            if (a->locks != c.locks) f.add(where + ": lock set of " + c.id + " changed");
            for (Attr k : c.locks) {
                ++locksChecked;
                auto x = c.style.find(k);
                auto y = a->style.find(k);
                const bool xHas = x != c.style.end(), yHas = y != a->style.end();
                if (xHas != yHas || (xHas && (x->second != y->second || value_text(x->second) != value_text(y->second))))
                    f.add(where + ": " + c.id + " locked " + std::string(key_name(k)) + " changed");
            }
        }
    };
    for (int trial = 0; trial < kLockTrials; ++trial) {
        auto canvas = random_doc("canvas", {.components = std::uniform_int_distribution<std::size_t>(1, 10)(rng),
                                            .density = 0.6, .idPrefix = "t"},
                                 rng);
        random_locks(canvas, rng, std::uniform_real_distribution<double>(0.1, 0.9)(rng));
        const auto ref = as_reference(random_doc("ref", {.components = 6, .density = 0.9}, rng));
        ReuseRequest req;
        req.referenceId = kRefId;
        req.bundle = kAllBundles[static_cast<std::size_t>(trial) % kAllBundles.size()];
        req.fillPlaceholders = trial % 3 == 0;
        req.targetSel = random_selection(canvas, rng);
        const std::string where = "trial " + std::to_string(trial);
        check(canvas, apply_bundle(canvas, ref, req, nullptr, options()).doc, where + " apply");

        const auto& info = kVocabulary[std::uniform_int_distribution<std::size_t>(0, kAttrCount - 1)(rng)];
        std::optional<AttributeValue> value;
        if (trial % 4 != 0) value = random_value(info.attr, rng, 8);
        KindScope scope = KindScope::all();
        if (trial % 3 == 1) scope.family = Family::Chart;
        check(canvas, propagate_attribute(canvas, info.attr, value, scope, kNow), where + " propagate");
    }
    return f.outcome(std::to_string(kLockTrials) + " trials, " + std::to_string(locksChecked) +
                     " locked values unchanged");
}

// ---------------------------------------------------------------------------
// Extraction fuzzing

class FixedExtractor : public ExtractorClient {
public:
    explicit FixedExtractor(std::string response) : response_(std::move(response)) {}
    std::string id() const override { return "fuzz"; }
    std::string extract(std::span<const std::uint8_t>, const json&) override { return response_; }

private:
    std::string response_;
};

json random_scalar(Rng& rng) {
    switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
        case 0: return nullptr;
        case 1: return true;
        case 2: return -1e308;
        case 3: return 1e308;
        case 4: return std::uniform_real_distribution<double>(-2, 2)(rng);
        case 5: return "";
        case 6: return "#GGGGGG";
        case 7: return json::array({1, 2});
        case 8: return json::object({{"x", 1}});
        default: return "\xff\xfe junk";
    }
}

json fuzz_component(Rng& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    static const char* kKinds[] = {"chart", "bar", "text", "image", "bigNumber", "filterWidget", "container",
                                   "hologram", "", "CHART", "line", "sankey"};
    static const char* kSubtypes[] = {"bar", "line", "area", "pie", "map", "donut", ""};
    json c = json::object();
    if (u(rng) < 0.9) {
        if (u(rng) < 0.3) c["kind"] = kKinds[std::uniform_int_distribution<int>(0, 11)(rng)];
        else if (u(rng) < 0.9)
            c["kind"] = {{"family", kKinds[std::uniform_int_distribution<int>(0, 11)(rng)]},
                         {"chartSubtype", kSubtypes[std::uniform_int_distribution<int>(0, 6)(rng)]}};
        else c["kind"] = random_scalar(rng);
    }
    if (u(rng) < 0.9) {
        json b = json::object();
        for (const char* k : {"x", "y", "w", "h"}) {
            const double r = u(rng);
            if (r < 0.75) b[k] = std::uniform_real_distribution<double>(-0.3, 1.3)(rng);
            else if (r < 0.9) b[k] = random_scalar(rng);
        }
        c["bbox"] = u(rng) < 0.95 ? b : random_scalar(rng);
    }
    if (u(rng) < 0.9) {
        json attrs = json::object();
        const int n = std::uniform_int_distribution<int>(0, 8)(rng);
        for (int i = 0; i < n; ++i) {
            std::string key = u(rng) < 0.85
                                  ? std::string(kVocabulary[std::uniform_int_distribution<std::size_t>(0, kAttrCount - 1)(rng)].key)
                                  : "color.glow." + std::to_string(i);
            const double r = u(rng);
            if (r < 0.3) {
                auto a = parse_attr(key);
                attrs[key] = a ? value_to_json(random_value(*a, rng, 8)) : json("x");
            }
            else if (r < 0.5) attrs[key] = "-" + std::to_string(std::uniform_int_distribution<int>(0, 20)(rng)) + "px";
            else if (r < 0.6) attrs[key] = "#ABCDEF";
            else if (r < 0.7) attrs[key] = "bold";
            else attrs[key] = random_scalar(rng);
        }
        c["attrs"] = u(rng) < 0.95 ? attrs : random_scalar(rng);
    }
    return c;
}

std::string fuzz_response(Rng& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    json arr = json::array();
    const int n = std::uniform_int_distribution<int>(0, 8)(rng);
    for (int i = 0; i < n; ++i) arr.push_back(u(rng) < 0.9 ? fuzz_component(rng) : random_scalar(rng));
    std::string text = arr.dump(-1, ' ', false, json::error_handler_t::replace);
    const double r = u(rng);
    if (r < 0.08 && !text.empty()) text.resize(std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng));
    else if (r < 0.12) text = "{\"components\": " + text + "}";
    else if (r < 0.15) {
        text.clear();
        const auto len = std::uniform_int_distribution<int>(0, 64)(rng);
        for (int i = 0; i < len; ++i) text.push_back(static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng)));
    } else if (r < 0.2) {
        for (int i = 0; i < 3 && !text.empty(); ++i)
            text[std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng)] =
                "{}[],:\"0e-"[std::uniform_int_distribution<int>(0, 10)(rng)];
    }
    return text;
}

/// Independent survival rule for one response entry.
bool should_survive(const json& item) {
    if (!item.is_object()) return false;
    auto kind = item.find("kind");
    std::string family;
    if (kind != item.end()) {
        if (kind->is_string()) family = kind->get<std::string>();
        else if (kind->is_object() && kind->contains("family") && (*kind)["family"].is_string())
            family = (*kind)["family"].get<std::string>();
    }
    static const std::set<std::string> kKnown{"chart", "bigNumber", "text", "image", "filterWidget", "container",
                                              "bar", "line", "area", "scatter", "pie", "table", "map", "other"};
    if (!kKnown.count(family)) return false;
    auto bbox = item.find("bbox");
    if (bbox == item.end() || !bbox->is_object()) return false;
    for (const char* k : {"x", "y", "w", "h"}) {
        auto v = bbox->find(k);
        if (v == bbox->end() || !v->is_number() || !std::isfinite(v->get<double>())) return false;
    }
    return true;
}

Outcome extraction_boundary() {
    Rng rng(0xF022);
    Failures f;
    const std::vector<std::uint8_t> image{1, 2, 3, 4};
    std::size_t docs = 0, rejected = 0, warnings = 0;
    for (int i = 0; i < kFuzzCases; ++i) {
        const std::string response = fuzz_response(rng);
        const std::string where = "case " + std::to_string(i);
        FixedExtractor client(response);
        ExtractionOptions opts;
        opts.maxRetries = 0;
        try {
            const auto r = extract_from_image(image, client, opts, fixed_clock(kNow));
            ++docs;
            warnings += r.warnings.size();
            if (!validate_doc(r.design.doc).ok()) {
                f.add(where + ": invalid document");
                continue;
            }
            const json arr = json::parse(response);
            std::size_t survivors = 0;
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string prefix = "component[" + std::to_string(k) + "]";
                auto warned = [&](const std::string& needle) {
                    for (const auto& w : r.warnings)
                        if (w.rfind(prefix + ":", 0) == 0 && w.find(needle) != std::string::npos) return true;
                    return false;
                };
                if (!should_survive(arr[k])) {
                    if (!warned("")) f.add(where + ": silent drop of " + prefix);
                    continue;
                }
                const auto* c = r.design.doc.find("c" + std::to_string(++survivors));
                if (!c) {
                    f.add(where + ": survivor " + prefix + " missing");
                    continue;
                }
                const auto attrs = arr[k].contains("attrs") ? arr[k]["attrs"] : json();
                if (attrs.is_object()) {
                    for (auto it = attrs.begin(); it != attrs.end(); ++it) {
                        auto a = parse_attr(it.key());
                        if (a && c->style.count(*a)) continue;
                        if (!warned(it.key())) f.add(where + ": silent drop of " + prefix + " " + it.key());
                    }
                } else if (!attrs.is_null() && !warned("attrs")) {
                    f.add(where + ": silent drop of " + prefix + " attrs");
                }
            }
            if (survivors != r.design.doc.components.size()) f.add(where + ": component count mismatch");
        } catch (const ExternalServiceError&) {
            ++rejected;
        } catch (const std::exception& e) {
            f.add(where + ": unexpected exception " + e.what());
        }
    }
    return f.outcome(std::to_string(kFuzzCases) + " malformed outputs: " + std::to_string(docs) + " valid docs, " +
                     std::to_string(rejected) + " rejected, " + std::to_string(warnings) + " warnings");
}

// ---------------------------------------------------------------------------

Outcome serialization_corpus() {
    Failures f;
    const auto files = fixture_files();
    bool blank = false, single = false, thirty = false;
    for (const auto& p : files) {
        const std::string where = p.filename().string();
        try {
            const auto doc = parse_doc(slurp(p));
            if (!validate_doc(doc).ok()) f.add(where + ": invalid");
            blank |= doc.components.empty();
            single |= doc.components.size() == 1;
            thirty |= doc.components.size() == 30;
            const auto a = canonical_serialize(doc);
            const auto b = canonical_serialize(doc);
            if (a != b) f.add(where + ": serialization not deterministic");
            const auto back = parse_doc(a);
            if (back != doc) f.add(where + ": parse(serialize(d)) != d");
            if (canonical_serialize(back) != a) f.add(where + ": bytes changed on second round");
        } catch (const std::exception& e) {
            f.add(where + ": " + e.what());
        }
    }
    if (files.size() < kMinCorpus) f.add("only " + std::to_string(files.size()) + " documents");
    if (!blank || !single || !thirty) f.add("corpus lacks blank, single-component or 30-component document");
    return f.outcome(std::to_string(files.size()) + " documents round-trip byte-identically");
}

Outcome blank_canvas() {
    Failures f;
    const DashboardDoc* refDoc = nullptr;
    std::vector<DashboardDoc> corpus;
    for (const auto& p : fixture_files()) corpus.push_back(parse_doc(slurp(p)));
    for (const auto& d : corpus)
        if (d.components.size() == 6) {
            refDoc = &d;
            break;
        }
    if (!refDoc) return {false, "no 6-component reference in the corpus"};
    const auto ref = ingest_document(canonical_serialize(*refDoc), fixed_clock(kNow));
    DashboardDoc blank;
    blank.id = "blank";
    ReuseRequest req;
    req.referenceId = kRefId;
    req.bundle = BundleName::All;
    req.fillPlaceholders = true;
    const auto r = apply_bundle(blank, ref, req, nullptr, options());
    std::size_t placeholders = 0;
    for (const auto& c : r.doc.components) placeholders += c.placeholder ? 1 : 0;
    if (r.doc.components.size() != 6 || placeholders != 6)
        f.add(std::to_string(r.doc.components.size()) + " components, " + std::to_string(placeholders) + " placeholders");
    for (const auto& s : ref.doc.components) {
        const Component* match = nullptr;
        for (const auto& c : r.doc.components)
            if (c.placeholder && c.bbox == s.bbox && c.kind == s.kind) match = &c;
        if (!match) {
            f.add("no placeholder at the geometry of " + s.id);
            continue;
        }
        if (match->style != s.style) f.add("placeholder for " + s.id + " lacks the reference style");
        if (match->dataBinding) f.add("placeholder for " + s.id + " is data-bound");
    }
    if (!validate_doc(r.doc).ok()) f.add("invalid output");
    return f.outcome("'" + refDoc->id + "' onto an empty canvas: 6 placeholders with reference styles and geometry");
}

// ---------------------------------------------------------------------------

Outcome api_cli_parity() {
    Failures f;
    ScratchDir dir("acceptance");
    const std::string at = format_iso8601(kNow);
    RunningService svc(dir / "store", fixed_clock(kNow));
    const std::string refText = slurp(std::filesystem::path(REDASH_FIXTURE_DIR) / "sales-overview.json");
    const std::string canvasText = slurp(std::filesystem::path(REDASH_FIXTURE_DIR) / "two-charts.json");

    auto ingested = svc.post_raw("/references", refText);
    if (ingested.status != 200) return {false, "POST /references -> " + std::to_string(ingested.status)};
    const std::string refId = ingested.parsed()["referenceId"];

    auto created = svc.post("/canvas", json{{"doc", json::parse(canvasText)}});
    if (created.status != 200) return {false, "POST /canvas -> " + std::to_string(created.status)};
    const std::string canvasId = created.parsed()["canvasId"];
    const std::string base = "/canvas/" + canvasId;

    if (svc.post(base + "/undo", json::object()).status != 409) f.add("undo at depth 1 is not 409");
    const auto before = svc.get(base);

    const json request = {{"referenceId", refId}, {"bundle", "Style"}, {"fillPlaceholders", false}};
    auto applied = svc.post(base + "/apply", request);
    if (applied.status != 200) return {false, "POST apply -> " + std::to_string(applied.status) + " " + applied.body};
    const auto apiDoc = doc_from_json(applied.parsed()["doc"]);
    if (!applied.parsed().contains("revision")) f.add("apply response lacks revision");

    write_text(dir / "canvas.json", canvasText);
    const int rc = run_cli("--store " + shell_quote((dir / "store").string()) + " apply --ref " + refId +
                               " --target " + shell_quote((dir / "canvas.json").string()) +
                               " --bundle style --out " + shell_quote((dir / "out.json").string()) + " --at " + at,
                           dir / "cli.out", dir / "cli.err");
    if (rc != 0) f.add("CLI apply exited " + std::to_string(rc) + ": " + slurp(dir / "cli.err"));
    else {
        const auto cliDoc = parse_doc(slurp(dir / "out.json"));
        if (without_timestamps(cliDoc) != without_timestamps(apiDoc)) f.add("API and CLI apply results differ");
        if (canonical_serialize(cliDoc) != canonical_dump(applied.parsed()["doc"]))
            f.add("API and CLI apply bytes differ");
    }

    auto undone = svc.post(base + "/undo", json::object());
    if (undone.status != 200 || undone.body != before.body) f.add("undo did not restore the pre-apply document bytes");
    if (svc.get(base).body != before.body) f.add("GET after undo differs from pre-apply");

    const json prop = {{"key", "line.grid.visible"}, {"value", false}, {"scope", "chart"}};
    auto propagated = svc.post(base + "/propagate", prop);
    const int rc2 = run_cli("propagate --target " + shell_quote((dir / "canvas.json").string()) +
                                " --key line.grid.visible --value false --scope chart --out " +
                                shell_quote((dir / "prop.json").string()) + " --at " + at,
                            dir / "cli.out", dir / "cli.err");
    if (propagated.status != 200 || rc2 != 0) f.add("propagate failed");
    else if (slurp(dir / "prop.json") != propagated.body) f.add("API and CLI propagate bytes differ");
    if (svc.post(base + "/undo", json::object()).body != before.body) f.add("undo after propagate differs");

    auto bad = svc.post(base + "/apply", json{{"referenceId", "feedface"}, {"bundle", "Color"}});
    if (bad.status != 404) f.add("unknown reference gives " + std::to_string(bad.status));
    auto badBundle = svc.post(base + "/apply", json{{"referenceId", refId}, {"bundle", "Sparkle"}});
    if (badBundle.status != 400) f.add("unknown bundle gives " + std::to_string(badBundle.status));

    auto bundles = svc.get("/references/" + refId + "/bundles");
    if (bundles.status != 200 || bundles.parsed()["bundles"].size() != 6) f.add("bundles endpoint");
    return f.outcome("apply/propagate equal across API and CLI; undo restores bytes; 404/409/400 mapped");
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "bundle-key partition", bundle_partition},
        {2, "bundle closure", bundle_closure},
        {3, "matching oracle", matching_oracle},
        {4, "representative-spec oracle", representative_oracle},
        {5, "layout fidelity", layout_fidelity},
        {6, "composition and idempotence", composition_idempotence},
        {7, "lock inviolability", lock_inviolability},
        {8, "robust extraction boundary", extraction_boundary},
        {9, "serialization", serialization_corpus},
        {10, "blank-canvas placeholders", blank_canvas},
        {11, "API/CLI parity and undo", api_cli_parity},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("uncaught exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > kTimeBudgetSeconds) {
            o.pass = false;
            o.detail += " (over time budget)";
        }
        char head[128];
        std::snprintf(head, sizeof head, "%s  criterion %2d  %-28s %6.2fs  ", o.pass ? "PASS" : "FAIL", c.number,
                      c.name, secs);
        std::cout << head << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed;
}
