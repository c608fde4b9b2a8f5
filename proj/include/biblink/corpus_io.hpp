#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biblink/model.hpp"

namespace biblink {

// Version of the NDJSON corpus schema this build reads and writes. Lines may
// carry an explicit "schema_version"; anything else is rejected outright.
inline constexpr int kCorpusSchemaVersion = 1;

enum class IngestErrorKind { io, schema_version, malformed_fraction };

class IngestFailure : public std::runtime_error {
public:
    IngestFailure(IngestErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    IngestErrorKind kind() const { return kind_; }

private:
    IngestErrorKind kind_;
};

struct IngestOptions {
    std::string corpus_id;
    // Abort when more than this fraction of non-empty lines is malformed.
    double max_malformed_fraction = 0.01;
};

struct IngestError {
    std::size_t line_number = 0;
    std::string message;
};

struct IngestResult {
    Corpus corpus;
    std::vector<IngestError> errors;
    std::size_t lines_total = 0;
};

namespace detail {

using nlohmann::json;

inline std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::optional<std::string> opt_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw std::runtime_error(std::string(key) + " must be a string");
    return it->get<std::string>();
}

// String list with entries trimmed and empties dropped.
inline std::vector<std::string> string_list(const json& obj, const char* key) {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array()) throw std::runtime_error(std::string(key) + " must be an array");
    for (const auto& item : *it) {
        if (!item.is_string())
            throw std::runtime_error(std::string(key) + " entries must be strings");
        std::string value = trimmed(item.get<std::string>());
        if (!value.empty()) out.push_back(std::move(value));
    }
    return out;
}

inline DocumentRecord parse_record(const json& obj) {
    if (!obj.is_object()) throw std::runtime_error("line is not a JSON object");

    if (auto it = obj.find("schema_version"); it != obj.end()) {
        if (!it->is_number_integer() || it->get<int>() != kCorpusSchemaVersion)
            throw IngestFailure(IngestErrorKind::schema_version,
                                "unsupported schema_version " + it->dump() + " (expected " +
                                    std::to_string(kCorpusSchemaVersion) + ")");
    }

    DocumentRecord rec;
    auto id = opt_string(obj, "record_id");
    if (!id || id->empty()) throw std::runtime_error("missing or empty record_id");
    rec.record_id = std::move(*id);

    rec.doi = opt_string(obj, "doi");
    rec.title = opt_string(obj, "title");
    rec.publication_year = opt_string(obj, "publication_year");
    rec.volume = opt_string(obj, "volume");
    rec.issue = opt_string(obj, "issue");
    rec.begin_page = opt_string(obj, "begin_page");
    rec.end_page = opt_string(obj, "end_page");
    rec.article_number = opt_string(obj, "article_number");
    rec.document_type = opt_string(obj, "document_type");
    rec.language = opt_string(obj, "language");
    rec.discipline_labels = string_list(obj, "discipline_labels");
    rec.references = string_list(obj, "references");

    if (auto it = obj.find("authors"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw std::runtime_error("authors must be an array");
        for (const auto& a : *it) {
            if (!a.is_object()) throw std::runtime_error("authors entries must be objects");
            AuthorName author;
            author.full_name = opt_string(a, "full_name");
            author.last_name = opt_string(a, "last_name");
            author.first_name = opt_string(a, "first_name");
            rec.authors.push_back(std::move(author));
        }
    }

    if (auto it = obj.find("source"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) throw std::runtime_error("source must be an object");
        rec.source.issns = string_list(*it, "issns");
        rec.source.isbns = string_list(*it, "isbns");
        rec.source.title_variants = string_list(*it, "title_variants");
    }

    if (auto it = obj.find("reference_count"); it != obj.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
            throw std::runtime_error("reference_count must be a non-negative integer");
        rec.reference_count = it->get<std::uint64_t>();
    }
    return rec;
}

inline json record_to_json(const DocumentRecord& rec) {
    json obj = json::object();
    obj["record_id"] = rec.record_id;
    auto put = [&](const char* key, const std::optional<std::string>& value) {
        if (value) obj[key] = *value;
    };
    put("doi", rec.doi);
    put("title", rec.title);
    put("publication_year", rec.publication_year);
    put("volume", rec.volume);
    put("issue", rec.issue);
    put("begin_page", rec.begin_page);
    put("end_page", rec.end_page);
    put("article_number", rec.article_number);
    put("document_type", rec.document_type);
    put("language", rec.language);

    if (!rec.authors.empty()) {
        json arr = json::array();
        for (const auto& a : rec.authors) {
            json ao = json::object();
            if (a.full_name) ao["full_name"] = *a.full_name;
            if (a.last_name) ao["last_name"] = *a.last_name;
            if (a.first_name) ao["first_name"] = *a.first_name;
            arr.push_back(std::move(ao));
        }
        obj["authors"] = std::move(arr);
    }
    if (!rec.source.issns.empty() || !rec.source.isbns.empty() ||
        !rec.source.title_variants.empty()) {
        json src = json::object();
        if (!rec.source.issns.empty()) src["issns"] = rec.source.issns;
        if (!rec.source.isbns.empty()) src["isbns"] = rec.source.isbns;
        if (!rec.source.title_variants.empty()) src["title_variants"] = rec.source.title_variants;
        obj["source"] = std::move(src);
    }
    if (!rec.discipline_labels.empty()) obj["discipline_labels"] = rec.discipline_labels;
    if (rec.reference_count) obj["reference_count"] = *rec.reference_count;
    if (!rec.references.empty()) obj["references"] = rec.references;
    return obj;
}

}  // namespace detail

/// One corpus document as a single NDJSON line (no trailing newline). Keys
/// come out sorted, so emission is byte-stable.
inline std::string record_to_json_line(const DocumentRecord& rec) {
    return detail::record_to_json(rec).dump(-1, ' ', false,
                                            nlohmann::json::error_handler_t::replace);
}

/// Streaming NDJSON ingest. Malformed lines are collected with their line
/// numbers; the run aborts only when more than max_malformed_fraction of the
/// non-empty lines fail to parse. A schema_version other than the supported
/// one aborts immediately.
inline IngestResult ingest_corpus_stream(std::istream& in, const IngestOptions& opts = {}) {
    IngestResult result;
    result.corpus.set_corpus_id(opts.corpus_id);

    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trimmed(line).empty()) continue;
        ++result.lines_total;

        nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded()) {
            result.errors.push_back({line_number, "invalid JSON"});
            continue;
        }
        try {
            result.corpus.add(detail::parse_record(parsed));
        } catch (const IngestFailure&) {
            throw;
        } catch (const std::exception& e) {
            result.errors.push_back({line_number, e.what()});
        }
    }

    if (result.lines_total > 0) {
        double fraction = static_cast<double>(result.errors.size()) /
                          static_cast<double>(result.lines_total);
        if (fraction > opts.max_malformed_fraction)
            throw IngestFailure(
                IngestErrorKind::malformed_fraction,
                std::to_string(result.errors.size()) + " of " +
                    std::to_string(result.lines_total) +
                    " lines malformed, exceeding the configured limit");
    }
    return result;
}

inline IngestResult ingest_corpus(const std::string& path, const IngestOptions& opts = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestFailure(IngestErrorKind::io, "cannot open corpus file: " + path);
    IngestOptions effective = opts;
    if (effective.corpus_id.empty()) effective.corpus_id = path;
    return ingest_corpus_stream(in, effective);
}

inline void write_corpus_ndjson(const Corpus& corpus, std::ostream& out) {
    for (const auto& rec : corpus.records()) out << record_to_json_line(rec) << '\n';
}

inline void write_corpus_ndjson(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestFailure(IngestErrorKind::io, "cannot write corpus file: " + path);
    write_corpus_ndjson(corpus, out);
    if (!out) throw IngestFailure(IngestErrorKind::io, "write failed: " + path);
}

}  // namespace biblink
