#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "redash/digest.hpp"
#include "redash/errors.hpp"
#include "redash/ingest.hpp"
#include "redash/serialize.hpp"
#include "redash/time.hpp"
#include "redash/validate.hpp"

namespace redash {

struct CatalogEntry {
    std::string referenceId;
    ReferenceDesign design;
    std::vector<std::string> tags;
    Timestamp addedAt{};

    friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

struct BookmarkedOnly {};
struct TagFilter {
    std::string tag;
};
struct NoFilter {};
using ListFilter = std::variant<NoFilter, BookmarkedOnly, TagFilter>;

/// Content address: SHA-256 of the canonical serialization.
inline std::string reference_id(const DashboardDoc& doc) { return sha256_hex(canonical_serialize(doc)); }

/// Bookmarked first, then most recently added, then id.
inline void sort_listing(std::vector<CatalogEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
        if (a.design.bookmarked != b.design.bookmarked) return a.design.bookmarked;
        if (a.addedAt != b.addedAt) return a.addedAt > b.addedAt;
        return a.referenceId < b.referenceId;
    });
}

inline bool passes(const CatalogEntry& e, const ListFilter& f) {
    if (std::holds_alternative<BookmarkedOnly>(f)) return e.design.bookmarked;
    if (const auto* t = std::get_if<TagFilter>(&f))
        return std::find(e.tags.begin(), e.tags.end(), t->tag) != e.tags.end();
    return true;
}

class ReferenceStore {
public:
    virtual ~ReferenceStore() = default;
    virtual std::string add_reference(const ReferenceDesign& design, const std::vector<std::string>& tags) = 0;
    virtual std::vector<CatalogEntry> list_references(const ListFilter& filter = NoFilter{}) const = 0;
    virtual CatalogEntry set_bookmark(const std::string& referenceId, bool flag) = 0;
    virtual std::optional<CatalogEntry> find(const std::string& referenceId) const = 0;

    CatalogEntry get(const std::string& referenceId) const {
        auto e = find(referenceId);
        if (!e) throw NotFound("unknown reference " + referenceId);
        return *e;
    }
};

/// <root>/references/<id>.json holds the canonical doc; <root>/index.json
/// holds {id, bookmarked, tags, addedAt} plus origin and ingest time.
/// One handle serializes its writers; readers see a consistent snapshot.
class DirectoryStore : public ReferenceStore {
public:
    explicit DirectoryStore(std::filesystem::path root, Clock clock = system_clock())
        : root_(std::move(root)), clock_(std::move(clock)) {
        std::error_code ec;
        std::filesystem::create_directories(root_ / "references", ec);
        if (ec) throw StorageError("cannot create store at " + root_.string() + ": " + ec.message());
        load();
    }

    const std::filesystem::path& root() const { return root_; }

    std::string add_reference(const ReferenceDesign& design, const std::vector<std::string>& tags) override {
        require_valid(design.doc);
        const std::string id = reference_id(design.doc);
        std::unique_lock lock(mu_);
        if (entries_.count(id)) return id;
        CatalogEntry e{id, design, tags, clock_()};
        write_file(root_ / "references" / (id + ".json"), canonical_serialize(design.doc));
        entries_.emplace(id, std::move(e));
        write_index();
        return id;
    }

    std::vector<CatalogEntry> list_references(const ListFilter& filter = NoFilter{}) const override {
        std::shared_lock lock(mu_);
        std::vector<CatalogEntry> out;
        for (const auto& [id, e] : entries_)
            if (passes(e, filter)) out.push_back(e);
        sort_listing(out);
        return out;
    }

    CatalogEntry set_bookmark(const std::string& referenceId, bool flag) override {
        std::unique_lock lock(mu_);
        auto it = entries_.find(referenceId);
        if (it == entries_.end()) throw NotFound("unknown reference " + referenceId);
        if (it->second.design.bookmarked != flag) {
            it->second.design.bookmarked = flag;
            write_index();
        }
        return it->second;
    }

    std::optional<CatalogEntry> find(const std::string& referenceId) const override {
        std::shared_lock lock(mu_);
        auto it = entries_.find(referenceId);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

private:
    static void write_file(const std::filesystem::path& p, const std::string& bytes) {
        const auto tmp = p.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!out) throw StorageError("cannot write " + tmp);
        }
        std::error_code ec;
        std::filesystem::rename(tmp, p, ec);
        if (ec) throw StorageError("cannot rename " + tmp + ": " + ec.message());
    }

    static std::string read_file(const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw StorageError("cannot read " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_index() const {
        json arr = json::array();
        for (const auto& [id, e] : entries_)
            arr.push_back({{"id", id},
                           {"bookmarked", e.design.bookmarked},
                           {"tags", e.tags},
                           {"addedAt", format_iso8601(e.addedAt)},
                           {"ingestedAt", format_iso8601(e.design.ingestedAt)},
                           {"origin", origin_to_json(e.design.origin)}});
        write_file(root_ / "index.json", canonical_dump(arr));
    }

    void load() {
        const auto indexPath = root_ / "index.json";
        if (!std::filesystem::exists(indexPath)) return;
        json arr;
        try {
            arr = json::parse(read_file(indexPath));
        } catch (const json::exception& e) {
            throw StorageError("corrupt index " + indexPath.string() + ": " + e.what());
        }
        if (!arr.is_array()) throw StorageError("corrupt index " + indexPath.string());
        for (const auto& item : arr) {
            CatalogEntry e;
            try {
                e.referenceId = item.at("id").get<std::string>();
                e.design.bookmarked = item.value("bookmarked", false);
                e.tags = item.value("tags", std::vector<std::string>{});
                e.addedAt = parse_iso8601(item.at("addedAt").get<std::string>()).value_or(Timestamp{});
                e.design.ingestedAt =
                    parse_iso8601(item.value("ingestedAt", std::string{})).value_or(e.addedAt);
                e.design.origin = origin_from_json(item.value("origin", json()));
                e.design.doc = parse_doc(read_file(root_ / "references" / (e.referenceId + ".json")));
            } catch (const json::exception& ex) {
                throw StorageError("corrupt index entry: " + std::string(ex.what()));
            } catch (const ParseError& ex) {
                throw StorageError("corrupt reference " + e.referenceId + ": " + ex.what());
            }
            entries_.emplace(e.referenceId, std::move(e));
        }
    }

    std::filesystem::path root_;
    Clock clock_;
    mutable std::shared_mutex mu_;
    std::map<std::string, CatalogEntry> entries_;
};

/// Store root from --store, else REDASH_STORE_DIR, else ./redash-store.
inline std::filesystem::path resolve_store_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("REDASH_STORE_DIR"); env && *env) return env;
    return "redash-store";
}

inline json entry_summary_json(const CatalogEntry& e) {
    return {{"referenceId", e.referenceId},
            {"title", e.design.doc.title},
            {"author", e.design.doc.author},
            {"bookmarked", e.design.bookmarked},
            {"tags", e.tags},
            {"addedAt", format_iso8601(e.addedAt)},
            {"componentCount", e.design.doc.components.size()},
            {"origin", origin_to_json(e.design.origin)}};
}

}  // namespace redash
