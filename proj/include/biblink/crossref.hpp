#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "biblink/corpus_io.hpp"
#include "biblink/model.hpp"

namespace biblink {

/// Harvest settings for the public Crossref works endpoint. A mailto address
/// is required: it routes requests through the polite pool and is simple good
/// citizenship.
struct HarvestOptions {
    std::string base_url = "https://api.crossref.org";
    std::string mailto;
    std::string from_pub_date;   // YYYY-MM-DD, optional
    std::string until_pub_date;  // YYYY-MM-DD, optional
    std::string doi_prefix;      // e.g. "10.1162", optional
    std::size_t rows_per_page = 200;
    std::size_t max_works = 0;  // 0 = no limit
    unsigned max_retries = 5;
    unsigned initial_backoff_ms = 1000;
    std::string cursor_file;  // enables resuming an interrupted harvest
};

struct HarvestStats {
    std::size_t pages = 0;
    std::size_t fetched = 0;
    std::size_t written = 0;
    std::size_t excluded = 0;
};

class HarvestFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Content types excluded from harvesting: fragments, non-document entities
/// and container-level records.
inline bool crossref_type_excluded(const std::string& type) {
    static const std::unordered_set<std::string> excluded = {
        "book-part",   "book-section",  "component",          "dataset",
        "journal-issue", "peer-review", "posted-content",     "proceedings",
        "proceedings-series", "report-series", "standard",
    };
    return excluded.count(type) != 0;
}

namespace detail {

inline std::string lowercase(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline std::optional<std::string> json_string_at(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return std::nullopt;
    std::string v = it->get<std::string>();
    if (v.empty()) return std::nullopt;
    return v;
}

inline std::optional<std::string> first_array_string(const nlohmann::json& obj,
                                                     const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array() || it->empty() || !(*it)[0].is_string())
        return std::nullopt;
    std::string v = (*it)[0].get<std::string>();
    if (v.empty()) return std::nullopt;
    return v;
}

inline std::optional<std::string> issued_year(const nlohmann::json& work) {
    auto issued = work.find("issued");
    if (issued == work.end()) return std::nullopt;
    auto parts = issued->find("date-parts");
    if (parts == issued->end() || !parts->is_array() || parts->empty()) return std::nullopt;
    const auto& first = (*parts)[0];
    if (!first.is_array() || first.empty() || !first[0].is_number_integer())
        return std::nullopt;
    return std::to_string(first[0].get<std::int64_t>());
}

// ISBNs often arrive as "http://id.crossref.org/isbn/978-...": keep the tail.
inline std::string strip_isbn_url(const std::string& isbn) {
    std::size_t slash = isbn.rfind('/');
    return slash == std::string::npos ? isbn : isbn.substr(slash + 1);
}

inline std::string url_encode(std::string_view value) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size());
    for (unsigned char c : value) {
        bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.' || c == '~';
        if (keep) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

}  // namespace detail

/// Maps one Crossref work object onto the corpus schema. Returns nothing for
/// excluded content types or works without a DOI. Closed or undeposited
/// reference lists come out as an absent reference_count ("not available"),
/// while a deposited list yields its length even when some entries cannot be
/// resolved to DOIs.
inline std::optional<DocumentRecord> crossref_work_to_record(const nlohmann::json& work) {
    if (!work.is_object()) return std::nullopt;
    auto doi = detail::json_string_at(work, "DOI");
    if (!doi) return std::nullopt;
    auto type = detail::json_string_at(work, "type");
    if (type && crossref_type_excluded(*type)) return std::nullopt;

    DocumentRecord rec;
    rec.record_id = detail::lowercase(*doi);
    rec.doi = rec.record_id;
    rec.title = detail::first_array_string(work, "title");
    rec.document_type = type;
    rec.language = detail::json_string_at(work, "language");
    rec.publication_year = detail::issued_year(work);
    rec.volume = detail::json_string_at(work, "volume");
    rec.issue = detail::json_string_at(work, "issue");
    rec.article_number = detail::json_string_at(work, "article-number");

    if (auto page = detail::json_string_at(work, "page")) {
        std::size_t dash = page->find('-');
        if (dash == std::string::npos) {
            rec.begin_page = *page;
        } else {
            rec.begin_page = page->substr(0, dash);
            std::string end = page->substr(dash + 1);
            if (!end.empty()) rec.end_page = std::move(end);
        }
    }

    if (auto it = work.find("author"); it != work.end() && it->is_array()) {
        for (const auto& a : *it) {
            if (!a.is_object()) continue;
            AuthorName author;
            author.last_name = detail::json_string_at(a, "family");
            author.first_name = detail::json_string_at(a, "given");
            if (!author.last_name) author.full_name = detail::json_string_at(a, "name");
            if (author.last_name || author.full_name) rec.authors.push_back(std::move(author));
        }
    }

    if (auto it = work.find("container-title"); it != work.end() && it->is_array())
        for (const auto& v : *it)
            if (v.is_string() && !v.get<std::string>().empty())
                rec.source.title_variants.push_back(v.get<std::string>());
    if (auto it = work.find("short-container-title"); it != work.end() && it->is_array())
        for (const auto& v : *it)
            if (v.is_string() && !v.get<std::string>().empty())
                rec.source.title_variants.push_back(v.get<std::string>());
    if (auto it = work.find("ISSN"); it != work.end() && it->is_array())
        for (const auto& v : *it)
            if (v.is_string()) rec.source.issns.push_back(v.get<std::string>());
    if (auto it = work.find("ISBN"); it != work.end() && it->is_array())
        for (const auto& v : *it)
            if (v.is_string())
                rec.source.isbns.push_back(detail::strip_isbn_url(v.get<std::string>()));

    if (auto it = work.find("subject"); it != work.end() && it->is_array())
        for (const auto& v : *it)
            if (v.is_string()) rec.discipline_labels.push_back(v.get<std::string>());

    if (auto it = work.find("reference"); it != work.end() && it->is_array()) {
        rec.reference_count = it->size();
        for (const auto& ref : *it) {
            if (!ref.is_object()) continue;
            if (auto ref_doi = detail::json_string_at(ref, "DOI"))
                rec.references.push_back(detail::lowercase(*ref_doi));
        }
    }
    return rec;
}

namespace detail {

struct CursorState {
    std::string cursor = "*";
    std::size_t written = 0;
};

inline CursorState load_cursor(const std::string& path) {
    CursorState st;
    if (path.empty()) return st;
    std::ifstream in(path);
    if (!in) return st;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_object()) {
        if (auto c = json_string_at(j, "cursor")) st.cursor = *c;
        if (j.contains("written") && j["written"].is_number_unsigned())
            st.written = j["written"].get<std::size_t>();
    }
    return st;
}

inline void save_cursor(const std::string& path, const CursorState& st) {
    if (path.empty()) return;
    nlohmann::json j = {{"cursor", st.cursor}, {"written", st.written}};
    std::ofstream out(path, std::ios::trunc);
    out << j.dump() << "\n";
}

}  // namespace detail

/// Pages through the works endpoint with cursor pagination, writing one
/// NDJSON record per kept work. Transient failures (connect errors, 429,
/// 5xx) are retried with exponential backoff; anything else fails hard.
/// With a cursor_file the harvest resumes where it left off, so the caller
/// should open the output stream in append mode when resuming.
inline HarvestStats harvest_crossref(const HarvestOptions& opts, std::ostream& out) {
    if (opts.mailto.empty())
        throw HarvestFailure("a --mailto contact address is required for harvesting");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (opts.base_url.rfind("https://", 0) == 0)
        throw HarvestFailure("built without TLS support; use an http:// base URL or rebuild "
                             "with OpenSSL");
#endif

    httplib::Client client(opts.base_url);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    client.set_follow_location(true);
    client.set_default_headers(
        {{"User-Agent", "biblink/0.1 (mailto:" + opts.mailto + ")"}});

    std::string filter;
    auto add_filter = [&](const std::string& name, const std::string& value) {
        if (value.empty()) return;
        if (!filter.empty()) filter += ',';
        filter += name + ':' + value;
    };
    add_filter("from-pub-date", opts.from_pub_date);
    add_filter("until-pub-date", opts.until_pub_date);
    add_filter("prefix", opts.doi_prefix);

    detail::CursorState cursor = detail::load_cursor(opts.cursor_file);
    HarvestStats stats;
    stats.written = cursor.written;

    while (true) {
        std::string path = "/works?rows=" + std::to_string(opts.rows_per_page) +
                           "&cursor=" + detail::url_encode(cursor.cursor) +
                           "&mailto=" + detail::url_encode(opts.mailto);
        if (!filter.empty()) path += "&filter=" + detail::url_encode(filter);

        httplib::Result res;
        unsigned backoff_ms = opts.initial_backoff_ms;
        for (unsigned attempt = 0;; ++attempt) {
            res = client.Get(path);
            bool transient = !res || res->status == 429 || res->status >= 500;
            if (!transient) break;
            if (attempt >= opts.max_retries)
                throw HarvestFailure("crossref request failed after " +
                                     std::to_string(opts.max_retries + 1) + " attempts: " +
                                     (res ? "HTTP " + std::to_string(res->status)
                                          : httplib::to_string(res.error())));
            unsigned wait_ms = backoff_ms;
            if (res && res->has_header("Retry-After")) {
                // Honor the server's wish, within reason.
                long retry_after = std::strtol(res->get_header_value("Retry-After").c_str(),
                                               nullptr, 10);
                if (retry_after > 0 && retry_after <= 120)
                    wait_ms = static_cast<unsigned>(retry_after) * 1000;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
            backoff_ms = std::min(backoff_ms * 2, 60000u);
        }
        if (res->status != 200)
            throw HarvestFailure("crossref request failed: HTTP " +
                                 std::to_string(res->status));

        nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
        if (body.is_discarded() || !body.contains("message"))
            throw HarvestFailure("crossref response is not valid JSON");
        const nlohmann::json& message = body["message"];
        const auto items = message.find("items");
        ++stats.pages;
        if (items == message.end() || !items->is_array() || items->empty()) break;

        for (const auto& work : *items) {
            ++stats.fetched;
            auto rec = crossref_work_to_record(work);
            if (!rec) {
                ++stats.excluded;
                continue;
            }
            out << record_to_json_line(*rec) << '\n';
            ++stats.written;
            if (opts.max_works > 0 && stats.written >= opts.max_works) break;
        }
        out.flush();

        auto next = detail::json_string_at(message, "next-cursor");
        if (!next) break;
        cursor.cursor = *next;
        cursor.written = stats.written;
        detail::save_cursor(opts.cursor_file, cursor);
        if (opts.max_works > 0 && stats.written >= opts.max_works) break;
    }
    return stats;
}

/// Post-harvest pass: drops references whose target was not harvested, so the
/// corpus invariant (references resolve within the corpus) holds. Reference
/// counts are untouched. Idempotent; run it once the harvest is complete.
inline void resolve_harvested_references(const std::string& ndjson_path) {
    IngestOptions opts;
    opts.corpus_id = ndjson_path;
    opts.max_malformed_fraction = 0.0;
    IngestResult loaded = ingest_corpus(ndjson_path, opts);

    std::unordered_set<std::string_view> ids;
    for (const auto& rec : loaded.corpus.records()) ids.insert(rec.record_id);

    Corpus resolved(loaded.corpus.corpus_id());
    for (DocumentRecord rec : loaded.corpus.records()) {
        std::erase_if(rec.references,
                      [&](const std::string& ref) { return !ids.count(ref); });
        resolved.add(std::move(rec));
    }
    write_corpus_ndjson(resolved, ndjson_path);
}

}  // namespace biblink
