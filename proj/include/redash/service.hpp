#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "httplib.h"

#include "redash/catalog.hpp"
#include "redash/digest.hpp"
#include "redash/http_clients.hpp"
#include "redash/ingest.hpp"
#include "redash/ops.hpp"
#include "redash/session.hpp"
#include "redash/transfer.hpp"

namespace redash {

inline constexpr int kDefaultPort = 7878;

struct ServiceConfig {
    std::vector<Component> palette = default_palette();
    std::size_t historyCapacity = CanvasSession::kDefaultCapacity;
    Clock clock = system_clock();
};

/// HTTP API over the engine. Sessions are in memory; each canvas has its own
/// mutex so mutations to one canvas are serialized.
class Service {
public:
    Service(ReferenceStore& store, std::unique_ptr<ExtractorClient> extractor, std::unique_ptr<PairMerger> merger,
            ServiceConfig config = {})
        : store_(store), extractor_(std::move(extractor)), merger_(std::move(merger)), config_(std::move(config)) {}

    void install(httplib::Server& srv) {
        srv.Post("/references", wrap([this](const httplib::Request& req) { return post_reference(req); }));
        srv.Get("/references", wrap([this](const httplib::Request& req) { return list_references(req); }));
        srv.Post(R"(/references/([^/]+)/bookmark)",
                 wrap([this](const httplib::Request& req) { return post_bookmark(req); }));
        srv.Get(R"(/references/([^/]+)/bundles)", wrap([this](const httplib::Request& req) { return get_bundles(req); }));
        srv.Get("/palette", wrap([this](const httplib::Request&) { return Reply{200, palette_to_json(config_.palette)}; }));
        srv.Post("/canvas", wrap([this](const httplib::Request& req) { return post_canvas(req); }));
        srv.Get(R"(/canvas/([^/]+))", wrap([this](const httplib::Request& req) {
                    auto slot = session(req.matches[1]);
                    std::lock_guard lock(slot->mu);
                    return Reply{200, doc_to_json(slot->session.current())};
                }));
        srv.Post(R"(/canvas/([^/]+)/components)", wrap([this](const httplib::Request& req) { return post_component(req); }));
        srv.Post(R"(/canvas/([^/]+)/apply)", wrap([this](const httplib::Request& req) { return post_apply(req); }));
        srv.Post(R"(/canvas/([^/]+)/propagate)", wrap([this](const httplib::Request& req) { return post_propagate(req); }));
        srv.Post(R"(/canvas/([^/]+)/locks)", wrap([this](const httplib::Request& req) { return post_locks(req); }));
        srv.Post(R"(/canvas/([^/]+)/undo)", wrap([this](const httplib::Request& req) {
                     auto slot = session(req.matches[1]);
                     std::lock_guard lock(slot->mu);
                     return Reply{200, doc_to_json(slot->session.undo())};
                 }));
        srv.Get(R"(/canvas/([^/]+)/attribution)", wrap([this](const httplib::Request& req) {
                    auto slot = session(req.matches[1]);
                    std::lock_guard lock(slot->mu);
                    const auto& doc = slot->session.current();
                    return Reply{200, {{"revision", doc.revision},
                                       {"rows", attribution_to_json(attribution_summary(doc, catalog_lookup(store_)))}}};
                }));
    }

private:
    struct Reply {
        int status;
        json body;
    };

    struct Slot {
        std::mutex mu;
        CanvasSession session;
        Slot(std::string id, DashboardDoc doc, std::vector<Component> palette, std::size_t cap)
            : session(std::move(id), std::move(doc), std::move(palette), cap) {}
    };

    static json error_body(const std::string& msg) { return {{"error", msg}}; }

    static std::function<void(const httplib::Request&, httplib::Response&)> wrap(
        std::function<Reply(const httplib::Request&)> fn) {
        return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            Reply r{500, json()};
            try {
                r = fn(req);
            } catch (const ValidationError& e) {
                json vs = json::array();
                for (const auto& v : e.violations())
                    vs.push_back({{"componentId", v.componentId}, {"field", v.field}, {"rule", v.rule}});
                r = {400, {{"error", e.what()}, {"violations", vs}}};
            } catch (const ParseError& e) {
                r = {400, {{"error", e.what()}, {"offset", e.offset()}, {"path", e.path()}}};
            } catch (const InvalidArgument& e) {
                r = {400, error_body(e.what())};
            } catch (const NotFound& e) {
                r = {404, error_body(e.what())};
            } catch (const Conflict& e) {
                r = {409, error_body(e.what())};
            } catch (const ExternalServiceError& e) {
                r = {502, error_body(e.what())};
            } catch (const std::exception& e) {
                r = {500, error_body(e.what())};
            }
            res.status = r.status;
            res.set_content(canonical_dump(r.body), "application/json");
        };
    }

    std::shared_ptr<Slot> session(const std::string& id) {
        std::lock_guard lock(sessionsMu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw NotFound("unknown canvas " + id);
        return it->second;
    }

    Reply post_reference(const httplib::Request& req) {
        const json body = parse_json(req.body);
        ReferenceDesign design;
        json extra = json::object();
        if (body.is_object() && body.value("extract", false)) {
            if (!extractor_) throw ExternalServiceError("no extractor configured (set REDASH_EXTRACTOR_URL)");
            const auto image = base64_decode(detail::get_string(detail::require(body, "image", ""), "/image"));
            ExtractionOptions opts;
            opts.title = body.value("title", opts.title);
            opts.author = body.value("author", std::string{});
            auto result = extract_from_image(image, *extractor_, opts, config_.clock);
            design = std::move(result.design);
            extra = {{"warnings", result.warnings}, {"retryCount", result.retryCount}};
        } else {
            design = ingest_document(req.body, config_.clock);
        }
        std::vector<std::string> tags;
        if (body.is_object() && body.contains("tags") && body["tags"].is_array())
            for (const auto& t : body["tags"])
                if (t.is_string()) tags.push_back(t.get<std::string>());
        const auto id = store_.add_reference(design, tags);
        extra["referenceId"] = id;
        return {200, extra};
    }

    Reply list_references(const httplib::Request& req) {
        ListFilter filter = NoFilter{};
        if (req.has_param("bookmarked") && req.get_param_value("bookmarked") == "true") filter = BookmarkedOnly{};
        else if (req.has_param("tag")) filter = TagFilter{req.get_param_value("tag")};
        json arr = json::array();
        for (const auto& e : store_.list_references(filter)) arr.push_back(entry_summary_json(e));
        return {200, arr};
    }

    Reply post_bookmark(const httplib::Request& req) {
        const json body = parse_json(req.body);
        const bool flag = detail::get_bool(detail::require(detail::require_object(body, ""), "flag", ""), "/flag");
        return {200, entry_summary_json(store_.set_bookmark(req.matches[1], flag))};
    }

    Reply get_bundles(const httplib::Request& req) {
        const auto entry = store_.get(req.matches[1]);
        return {200, {{"referenceId", entry.referenceId}, {"bundles", bundles_json()}}};
    }

    Reply post_canvas(const httplib::Request& req) {
        DashboardDoc doc;
        const json body = req.body.empty() ? json::object() : parse_json(req.body);
        std::string id;
        {
            std::lock_guard lock(sessionsMu_);
            id = "canvas-" + std::to_string(++canvasCounter_);
        }
        if (body.is_object() && body.contains("doc")) {
            doc = doc_from_json(body["doc"]);
            sort_reading_order(doc.components);
        } else {
            doc.id = id;
            if (body.is_object()) {
                doc.title = body.value("title", std::string("untitled dashboard"));
                doc.author = body.value("author", std::string{});
                if (body.contains("canvasAspect"))
                    doc.canvasAspect = detail::get_number(body["canvasAspect"], "/canvasAspect");
            }
        }
        auto slot = std::make_shared<Slot>(id, doc, config_.palette, config_.historyCapacity);
        {
            std::lock_guard lock(sessionsMu_);
            sessions_.emplace(id, slot);
        }
        return {200, {{"canvasId", id}, {"revision", doc.revision}, {"doc", doc_to_json(doc)}}};
    }

    Reply post_component(const httplib::Request& req) {
        auto slot = session(req.matches[1]);
        const json body = parse_json(req.body);
        detail::require_object(body, "");
        const auto palId = detail::get_string(detail::require(body, "paletteComponentId", ""), "/paletteComponentId");
        const Component* pal = nullptr;
        for (const auto& c : config_.palette)
            if (c.id == palId) pal = &c;
        if (!pal) throw NotFound("unknown palette component " + palId);
        std::lock_guard lock(slot->mu);
        DashboardDoc doc = slot->session.current();
        Component c = *pal;
        if (body.contains("bbox")) c.bbox = bbox_from_json(body["bbox"], "/bbox");
        const std::string stem = palId.rfind("pal-", 0) == 0 ? palId.substr(4) : palId;
        for (int n = 1;; ++n) {
            c.id = stem + "-" + std::to_string(n);
            if (!doc.find(c.id)) break;
        }
        doc.components.push_back(std::move(c));
        sort_reading_order(doc.components);
        ++doc.revision;
        slot->session.push(doc);
        return {200, doc_to_json(doc)};
    }

    Reply post_apply(const httplib::Request& req) {
        auto slot = session(req.matches[1]);
        const auto request = request_from_json(parse_json(req.body));
        std::lock_guard lock(slot->mu);
        auto result = apply_from_catalog(store_, slot->session.current(), request, merger_.get(), config_.clock());
        slot->session.push(result.doc);
        json body = {{"doc", doc_to_json(result.doc)},
                     {"report", report_to_json(result.report)},
                     {"revision", result.doc.revision}};
        if (!result.report.mergerFallbacks.empty())
            body["note"] = "external merger failed for some pairs; deterministic merge used";
        return {200, body};
    }

    Reply post_propagate(const httplib::Request& req) {
        auto slot = session(req.matches[1]);
        const auto cmd = propagate_from_json(parse_json(req.body));
        std::lock_guard lock(slot->mu);
        auto doc = propagate_attribute(slot->session.current(), cmd.key, cmd.value, cmd.scope, config_.clock());
        slot->session.push(doc);
        return {200, doc_to_json(doc)};
    }

    Reply post_locks(const httplib::Request& req) {
        auto slot = session(req.matches[1]);
        const json body = parse_json(req.body);
        detail::require_object(body, "");
        const auto cid = detail::get_string(detail::require(body, "componentId", ""), "/componentId");
        std::set<Attr> keys;
        const auto& arr = detail::require(body, "keys", "");
        if (!arr.is_array()) throw ParseError("expected array", 0, "/keys");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = "/keys/" + std::to_string(i);
            keys.insert(detail::get_attr(detail::get_string(arr[i], p), p));
        }
        std::lock_guard lock(slot->mu);
        auto doc = set_locks(slot->session.current(), cid, keys);
        slot->session.push(doc);
        return {200, doc_to_json(doc)};
    }

public:
    static json bundles_json() {
        json arr = json::array();
        for (BundleName b : kAllBundles) {
            json keys = json::array();
            for (Attr a : bundle_keys(b)) keys.push_back(key_name(a));
            arr.push_back({{"name", to_string(b)},
                           {"features", bundle_feature_list(b)},
                           {"keys", keys},
                           {"includesGeometry", includes_geometry(b)}});
        }
        return arr;
    }

private:
    ReferenceStore& store_;
    std::unique_ptr<ExtractorClient> extractor_;
    std::unique_ptr<PairMerger> merger_;
    ServiceConfig config_;
    std::mutex sessionsMu_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::uint64_t canvasCounter_{0};
};

}  // namespace redash
