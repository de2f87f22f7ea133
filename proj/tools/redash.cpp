// redash: command-line front end and HTTP server for the dashboard reuse engine.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"

#include "redash/redash.hpp"

namespace {

using namespace redash;

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kExternal = 3 };

class IoError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path);
}

DashboardDoc load_canvas(const std::string& path) {
    auto doc = parse_doc(read_file(path));
    sort_reading_order(doc.components);
    require_valid(doc);
    return doc;
}

Selection selection_from_list(const std::vector<std::string>& ids) {
    if (ids.empty()) return AllComponents{};
    return std::set<std::string>(ids.begin(), ids.end());
}

std::string kind_label(const ReferenceDesign& d) {
    return std::holds_alternative<ImageExtractionOrigin>(d.origin) ? "image" : "file";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial dashboard reuse: ingest references, transfer design bundles, serve the authoring API"};
    app.require_subcommand(1);
    std::string storeFlag;
    app.add_option("--store", storeFlag, "Reference store directory (default: $REDASH_STORE_DIR or ./redash-store)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Add a dashboard document (or an image via the extractor) to the catalog");
    std::string ingestPath;
    bool ingestImage = false;
    std::vector<std::string> ingestTags;
    std::string ingestTitle = "extracted reference", ingestAuthor;
    ingest->add_option("file", ingestPath, "Dashboard document or image file")->required();
    ingest->add_flag("--image", ingestImage, "Treat the file as an image and run the external extractor");
    ingest->add_option("--tag", ingestTags, "Tag(s) for the catalog entry");
    ingest->add_option("--title", ingestTitle, "Title for image extractions");
    ingest->add_option("--author", ingestAuthor, "Author for image extractions");

    // refs
    auto* refs = app.add_subcommand("refs", "List catalog references");
    bool refsBookmarked = false;
    std::string refsTag;
    refs->add_flag("--bookmarked", refsBookmarked, "Only bookmarked references");
    refs->add_option("--tag", refsTag, "Only references with this tag");

    // bookmark
    auto* bookmark = app.add_subcommand("bookmark", "Bookmark (or un-bookmark) a reference");
    std::string bookmarkId;
    bool bookmarkOff = false;
    bookmark->add_option("refId", bookmarkId)->required();
    bookmark->add_flag("--off", bookmarkOff, "Clear the bookmark");

    // bundles
    auto* bundles = app.add_subcommand("bundles", "Print the six design bundles of a reference");
    std::string bundlesRef;
    bundles->add_option("refId", bundlesRef)->required();

    // apply
    auto* apply = app.add_subcommand("apply", "Apply a design bundle from a reference onto a canvas document");
    std::string applyRef, applyTarget, applyBundle, applyOut, applyReport, applyAt;
    std::vector<std::string> applySources, applyTargets;
    bool applyFill = false;
    apply->add_option("--ref", applyRef, "Reference id")->required();
    apply->add_option("--target", applyTarget, "Canvas document")->required();
    apply->add_option("--bundle", applyBundle, "Color|Lines|Text|Layout|Style|All")->required();
    apply->add_option("--sources", applySources, "Source component ids (default: all)")->delimiter(',');
    apply->add_option("--targets", applyTargets, "Target component ids (default: all)")->delimiter(',');
    apply->add_flag("--fill", applyFill, "Create placeholders for unmatched sources (Layout/All)");
    apply->add_option("--out", applyOut, "Output document")->required();
    apply->add_option("--report", applyReport, "Write the transfer report here");
    apply->add_option("--at", applyAt, "Provenance timestamp (ISO-8601 UTC; default: the reference's catalog time)");

    // propagate
    auto* propagate = app.add_subcommand("propagate", "Set or remove one attribute across components");
    std::string propTarget, propKey, propValue, propScope = "ALL", propOut, propAt;
    bool propRemove = false;
    propagate->add_option("--target", propTarget, "Canvas document")->required();
    propagate->add_option("--key", propKey, "Attribute key, e.g. line.grid.visible")->required();
    auto* valueOpt = propagate->add_option("--value", propValue, "Value (JSON literal or bare string)");
    auto* removeOpt = propagate->add_flag("--remove", propRemove, "Remove the key instead");
    valueOpt->excludes(removeOpt);
    propagate->add_option("--scope", propScope, "ALL, a family (chart, text, ...) or a chart subtype (bar, ...)");
    propagate->add_option("--out", propOut, "Output document")->required();
    propagate->add_option("--at", propAt, "Provenance timestamp (ISO-8601 UTC; default: now)");

    // attribution
    auto* attribution = app.add_subcommand("attribution", "Summarize which references a document borrows from");
    std::string attrPath;
    bool attrJson = false;
    attribution->add_option("file", attrPath)->required();
    attribution->add_flag("--json", attrJson, "Print JSON rows");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    int port = kDefaultPort;
    std::string host = "0.0.0.0", paletteFile;
    serve->add_option("--port", port, "Port (default 7878)");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--palette", paletteFile, "Component palette JSON (default: built-in palette)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto storeDir = resolve_store_dir(storeFlag);

        if (*ingest) {
            DirectoryStore store(storeDir);
            ReferenceDesign design;
            if (ingestImage) {
                auto client = HttpExtractorClient::from_env();
                if (!client) throw ExternalServiceError("REDASH_EXTRACTOR_URL is not set");
                const auto bytes = read_file(ingestPath);
                ExtractionOptions opts;
                opts.title = ingestTitle;
                opts.author = ingestAuthor;
                auto result = extract_from_image(
                    std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()), *client, opts);
                for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
                design = std::move(result.design);
            } else {
                design = ingest_document(read_file(ingestPath));
            }
            std::cout << store.add_reference(design, ingestTags) << '\n';
        } else if (*refs) {
            DirectoryStore store(storeDir);
            ListFilter filter = NoFilter{};
            if (refsBookmarked) filter = BookmarkedOnly{};
            else if (!refsTag.empty()) filter = TagFilter{refsTag};
            for (const auto& e : store.list_references(filter)) {
                std::cout << e.referenceId << (e.design.bookmarked ? "  * " : "    ") << e.design.doc.title << " ("
                          << (e.design.doc.author.empty() ? "unknown" : e.design.doc.author) << ", "
                          << e.design.doc.components.size() << " components, " << kind_label(e.design) << ")";
                if (!e.tags.empty()) {
                    std::cout << " [";
                    for (std::size_t i = 0; i < e.tags.size(); ++i) std::cout << (i ? "," : "") << e.tags[i];
                    std::cout << "]";
                }
                std::cout << '\n';
            }
        } else if (*bookmark) {
            DirectoryStore store(storeDir);
            const auto e = store.set_bookmark(bookmarkId, !bookmarkOff);
            std::cout << e.referenceId << (e.design.bookmarked ? " bookmarked" : " unbookmarked") << '\n';
        } else if (*bundles) {
            DirectoryStore store(storeDir);
            const auto e = store.get(bundlesRef);
            std::cout << e.design.doc.title << '\n';
            for (BundleName b : kAllBundles) {
                std::cout << "  " << to_string(b) << ": ";
                const auto features = bundle_feature_list(b);
                for (std::size_t i = 0; i < features.size(); ++i) std::cout << (i ? ", " : "") << features[i];
                std::cout << '\n';
            }
        } else if (*apply) {
            DirectoryStore store(storeDir);
            const auto canvas = load_canvas(applyTarget);
            auto bundle = parse_bundle(applyBundle);
            if (!bundle) throw InvalidArgument("unknown bundle " + applyBundle);
            ReuseRequest req{applyRef, *bundle, selection_from_list(applySources), selection_from_list(applyTargets),
                             applyFill};
            Timestamp at = store.get(applyRef).addedAt;
            if (!applyAt.empty()) {
                auto t = parse_iso8601(applyAt);
                if (!t) throw InvalidArgument("invalid --at timestamp " + applyAt);
                at = *t;
            }
            auto merger = HttpPairMerger::from_env();
            auto result = apply_from_catalog(store, canvas, req, merger.get(), at);
            write_file(applyOut, canonical_serialize(result.doc));
            if (!applyReport.empty()) write_file(applyReport, canonical_dump(report_to_json(result.report)));
            if (!result.report.mergerFallbacks.empty())
                std::cerr << "note: external merger failed for " << result.report.mergerFallbacks.size()
                          << " pair(s); deterministic merge used\n";
        } else if (*propagate) {
            const auto doc = load_canvas(propTarget);
            json body = {{"key", propKey}, {"scope", literal_from_text(propScope)}};
            if (propRemove) body["remove"] = true;
            else if (!valueOpt->empty()) body["value"] = literal_from_text(propValue);
            else throw InvalidArgument("either --value or --remove is required");
            if (body["scope"].is_number() || body["scope"].is_boolean()) body["scope"] = propScope;
            const auto cmd = propagate_from_json(body);
            Timestamp at = now_utc();
            if (!propAt.empty()) {
                auto t = parse_iso8601(propAt);
                if (!t) throw InvalidArgument("invalid --at timestamp " + propAt);
                at = *t;
            }
            write_file(propOut, canonical_serialize(propagate_attribute(doc, cmd.key, cmd.value, cmd.scope, at)));
        } else if (*attribution) {
            const auto doc = load_canvas(attrPath);
            DirectoryStore store(storeDir);
            const auto rows = attribution_summary(doc, catalog_lookup(store));
            if (attrJson) std::cout << canonical_dump(attribution_to_json(rows)) << '\n';
            else
                for (const auto& r : rows) std::cout << credit_line(r) << '\n';
        } else if (*serve) {
            DirectoryStore store(storeDir);
            ServiceConfig config;
            if (!paletteFile.empty()) config.palette = load_palette(paletteFile);
            Service service(store, HttpExtractorClient::from_env(), HttpPairMerger::from_env(), std::move(config));
            httplib::Server srv;
            service.install(srv);
            std::cerr << "redash listening on " << host << ':' << port << " (store " << store.root().string() << ")\n";
            if (!srv.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const NotFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ExternalServiceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExternal;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const StorageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}
