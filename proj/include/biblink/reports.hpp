#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "biblink/citation_overlap.hpp"
#include "biblink/corpus_io.hpp"
#include "biblink/coverage.hpp"
#include "biblink/csv.hpp"
#include "biblink/matcher.hpp"
#include "biblink/random.hpp"
#include "biblink/sha256.hpp"

namespace biblink {

inline constexpr const char* kToolName = "biblink";
inline constexpr const char* kToolVersion = "0.1.0";

/// Everything one run needs, with defaults reproducing the published
/// configuration (weights 15/7/14/5/14, threshold 30). All randomness flows
/// through sampling_seed; nothing depends on wall clock or thread timing, so
/// identical config + inputs give byte-identical outputs.
struct RunConfig {
    std::string path_a;
    std::string path_b;
    std::string baseline = "a";  // which input plays corpus A (supplies step-6 words)
    MatcherConfig matcher;
    CountBins reference_bins{{0, 10, 50}};
    CountBins citation_bins{{0, 5, 25}};
    std::uint64_t sampling_seed = 1;
    std::size_t sample_size = 30;
    double max_malformed_fraction = 0.01;
    std::string output_dir;
};

namespace detail {

inline std::vector<std::string> score_fields(const ScoreBreakdown& s) {
    return {format_double(s.total),   format_double(s.m_doi),  format_double(s.m_first_author),
            format_double(s.m_title), format_double(s.m_source), format_double(s.m_other)};
}

inline std::string display_key(const std::string& key) {
    std::string out = key;
    for (char& c : out)
        if (c == '\x1F') c = '|';
    return out;
}

inline std::string opt_or_empty(const std::optional<std::string>& v) { return v ? *v : ""; }

inline std::string first_or_empty(const std::vector<std::string>& v) {
    return v.empty() ? "" : v.front();
}

}  // namespace detail

inline Table match_table(const MatchSet& ms) {
    Table t;
    t.columns = {"id_a",  "id_b",           "step",    "total",   "m_doi",
                 "m_first_author", "m_title", "m_source", "m_other"};
    for (const auto& p : ms.pairs) {
        auto s = detail::score_fields(p.score);
        t.rows.push_back({p.id_a, p.id_b, std::to_string(p.step), s[0], s[1], s[2], s[3], s[4],
                          s[5]});
    }
    return t;
}

inline Table step_summary_table(const MatchSet& ms) {
    std::size_t total_matches = ms.pairs.size();
    Table t;
    t.columns = {"step", "candidates", "matches", "share_of_matches_pct"};
    for (int step = 1; step <= 6; ++step) {
        const StepStats& st = ms.steps[step];
        double share = total_matches == 0
                           ? 0.0
                           : 100.0 * static_cast<double>(st.matches) / total_matches;
        t.rows.push_back({std::to_string(step), std::to_string(st.candidates),
                          std::to_string(st.matches), format_double(share)});
    }
    return t;
}

/// Unmatched records of one side with their best rejected candidate (empty
/// columns when no blocking step ever paired them with anything).
inline Table unmatched_table(const MatchSet& ms, Perspective side) {
    const auto& ids = side == Perspective::a ? ms.unmatched_a : ms.unmatched_b;
    const auto& best = side == Perspective::a ? ms.best_rejected_a : ms.best_rejected_b;

    Table t;
    t.columns = {"record_id",  "best_candidate_id", "best_candidate_step",
                 "best_total", "best_m_doi",        "best_m_first_author",
                 "best_m_title", "best_m_source",   "best_m_other"};
    for (const auto& id : ids) {
        auto it = best.find(id);
        if (it == best.end()) {
            t.rows.push_back({id, "", "", "", "", "", "", "", ""});
            continue;
        }
        auto s = detail::score_fields(it->second.score);
        t.rows.push_back({id, it->second.other_id, std::to_string(it->second.step), s[0], s[1],
                          s[2], s[3], s[4], s[5]});
    }
    return t;
}

inline Table skipped_keys_table(const MatchSet& ms) {
    Table t;
    t.columns = {"step", "key", "side", "bucket_size"};
    for (const auto& sk : ms.skipped_keys)
        t.rows.push_back({std::to_string(sk.step), detail::display_key(sk.key),
                          std::string(1, sk.side), std::to_string(sk.bucket_size)});
    return t;
}

inline Table year_breakdown_table(const std::vector<YearRow>& rows) {
    Table t;
    t.columns = {"year", "total_a", "total_b", "overlap_a", "overlap_b"};
    for (const auto& r : rows)
        t.rows.push_back({r.year, std::to_string(r.total_a), std::to_string(r.total_b),
                          std::to_string(r.overlap_a), std::to_string(r.overlap_b)});
    return t;
}

inline Table coverage_table_csv(const CoverageTable& table) {
    Table t;
    t.columns = {table.dimension, "total", "overlap"};
    for (const auto& r : table.rows)
        t.rows.push_back({r.key, format_double(r.total), format_double(r.overlap)});
    return t;
}

inline Table language_rollup_table(const std::vector<LanguageRollupRow>& rollup) {
    Table t;
    t.columns = {"group", "total", "overlap", "overlap_rate"};
    for (const auto& r : rollup)
        t.rows.push_back({r.group, std::to_string(r.total), std::to_string(r.overlap),
                          format_double(r.overlap_rate)});
    return t;
}

namespace detail {

inline nlohmann::json coverage_table_json(const CoverageTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"key", r.key}, {"total", r.total}, {"overlap", r.overlap}});
    return {{"dimension", table.dimension},
            {"perspective", to_string(table.perspective)},
            {"rows", std::move(rows)}};
}

}  // namespace detail

/// Every coverage table in one JSON document, for consumers that do not want
/// to stitch the CSVs back together.
inline nlohmann::json coverage_bundle_json(const MatchSet& ms, const Corpus& a, const Corpus& b,
                                           const CountBins& reference_bins,
                                           const CountBins& citation_bins) {
    nlohmann::json bundle;
    OverlapSummary summary = overlap_summary(ms, a, b);
    bundle["summary"] = {{"total_a", summary.total_a},
                         {"total_b", summary.total_b},
                         {"overlap", summary.overlap}};

    nlohmann::json years = nlohmann::json::array();
    for (const auto& r : breakdown_by_year(ms, a, b))
        years.push_back({{"year", r.year},
                         {"total_a", r.total_a},
                         {"total_b", r.total_b},
                         {"overlap_a", r.overlap_a},
                         {"overlap_b", r.overlap_b}});
    bundle["by_year"] = std::move(years);

    for (Perspective p : {Perspective::a, Perspective::b}) {
        nlohmann::json side;
        side["document_type"] = detail::coverage_table_json(breakdown_by_doctype(ms, a, b, p));
        side["discipline"] = detail::coverage_table_json(breakdown_by_discipline(ms, a, b, p));
        side["reference_count"] = detail::coverage_table_json(
            breakdown_by_reference_count(ms, a, b, p, reference_bins));
        side["citation_count"] = detail::coverage_table_json(
            breakdown_by_citation_count(ms, a, b, p, citation_bins));
        LanguageBreakdown lang = breakdown_by_language(ms, a, b, p);
        side["language"] = detail::coverage_table_json(lang.per_language);
        nlohmann::json rollup = nlohmann::json::array();
        for (const auto& r : lang.rollup)
            rollup.push_back({{"group", r.group},
                              {"total", r.total},
                              {"overlap", r.overlap},
                              {"overlap_rate", r.overlap_rate}});
        side["language_rollup"] = std::move(rollup);
        bundle[p == Perspective::a ? "perspective_a" : "perspective_b"] = std::move(side);
    }
    return bundle;
}

inline nlohmann::json linkdiff_json(const LinkDiff& diff) {
    return {
        {"co_covered_a", diff.co_covered_a},
        {"co_covered_b", diff.co_covered_b},
        {"shared", diff.shared},
        {"only_a",
         {{"total", diff.only_a},
          {"missing_reference_list_in_other", diff.only_a_missing_reference_list},
          {"missing_reference_list_zero", diff.only_a_missing_reference_list_zero},
          {"missing_reference_list_absent",
           diff.only_a_missing_reference_list - diff.only_a_missing_reference_list_zero},
          {"unexplained", diff.only_a_unexplained},
          {"pct_of_co_covered", diff.pct_only_a()}}},
        {"only_b",
         {{"total", diff.only_b},
          {"missing_reference_list_in_other", diff.only_b_missing_reference_list},
          {"missing_reference_list_zero", diff.only_b_missing_reference_list_zero},
          {"missing_reference_list_absent",
           diff.only_b_missing_reference_list - diff.only_b_missing_reference_list_zero},
          {"unexplained", diff.only_b_unexplained},
          {"pct_of_co_covered", diff.pct_only_b()}}},
    };
}

/// Review worksheet for a seeded sample of one side's unmatched records: full
/// record metadata plus the best rejected candidate and its score breakdown,
/// the evidence needed to audit recall by hand.
inline Table unmatched_worksheet(const MatchSet& ms, const Corpus& a, const Corpus& b,
                                 Perspective side, std::size_t n, std::uint64_t seed,
                                 bool* truncated = nullptr) {
    const auto& ids = side == Perspective::a ? ms.unmatched_a : ms.unmatched_b;
    const auto& best = side == Perspective::a ? ms.best_rejected_a : ms.best_rejected_b;
    const Corpus& own = side == Perspective::a ? a : b;
    const Corpus& other = side == Perspective::a ? b : a;
    if (truncated) *truncated = n > ids.size();

    Table t;
    t.columns = {"record_id",     "doi",
                 "title",         "publication_year",
                 "first_author",  "source_title",
                 "document_type", "language",
                 "best_candidate_id", "best_candidate_step",
                 "best_total",    "best_m_doi",
                 "best_m_first_author", "best_m_title",
                 "best_m_source", "best_m_other",
                 "best_candidate_doi", "best_candidate_title"};
    for (std::size_t idx : sample_indices(ids.size(), n, seed)) {
        const std::string& id = ids[idx];
        const DocumentRecord* rec = own.find(id);
        std::vector<std::string> row(t.columns.size());
        row[0] = id;
        if (rec) {
            row[1] = detail::opt_or_empty(rec->doi);
            row[2] = detail::opt_or_empty(rec->title);
            row[3] = detail::opt_or_empty(rec->publication_year);
            if (!rec->authors.empty()) {
                const AuthorName& au = rec->authors.front();
                row[4] = au.full_name ? *au.full_name
                                      : detail::opt_or_empty(au.last_name) +
                                            (au.first_name ? ", " + *au.first_name : "");
            }
            row[5] = detail::first_or_empty(rec->source.title_variants);
            row[6] = detail::opt_or_empty(rec->document_type);
            row[7] = detail::opt_or_empty(rec->language);
        }
        if (auto it = best.find(id); it != best.end()) {
            auto s = detail::score_fields(it->second.score);
            row[8] = it->second.other_id;
            row[9] = std::to_string(it->second.step);
            for (int k = 0; k < 6; ++k) row[10 + k] = s[k];
            if (const DocumentRecord* cand = other.find(it->second.other_id)) {
                row[16] = detail::opt_or_empty(cand->doi);
                row[17] = detail::opt_or_empty(cand->title);
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Review worksheet over one-sided citation links: n sampled from each
/// direction, with titles/DOIs of citing and cited documents and the scores
/// of the underlying document matches (so reviewers can catch matching
/// mistakes, not just citation mistakes).
inline Table discrepancy_worksheet(const LinkDiff& diff, const Corpus& a, const Corpus& b,
                                   const MatchSet& ms, std::size_t n, std::uint64_t seed,
                                   bool* truncated = nullptr) {
    std::unordered_map<std::string_view, const MatchedPair*> by_a, by_b;
    for (const auto& p : ms.pairs) {
        by_a.emplace(p.id_a, &p);
        by_b.emplace(p.id_b, &p);
    }

    Table t;
    t.columns = {"direction",        "cause",
                 "reference_list",   "citing_id",
                 "citing_doi",       "citing_title",
                 "cited_id",         "cited_doi",
                 "cited_title",      "citing_match_id",
                 "citing_match_step", "citing_match_score",
                 "citing_match_doi", "citing_match_title",
                 "cited_match_id",   "cited_match_step",
                 "cited_match_score", "cited_match_doi",
                 "cited_match_title"};

    bool trunc_a = false, trunc_b = false;
    auto add_rows = [&](const std::vector<ClassifiedLink>& links, const char* direction,
                        const Corpus& own, const Corpus& other,
                        const std::unordered_map<std::string_view, const MatchedPair*>& pairs,
                        bool own_is_a, std::uint64_t side_seed, bool* trunc) {
        for (const ClassifiedLink& cl : sample_links(links, n, side_seed, trunc)) {
            std::vector<std::string> row(t.columns.size());
            row[0] = direction;
            row[1] = to_string(cl.cause);
            row[2] = cl.cause == DiffCause::missing_reference_list_in_other
                         ? (cl.reference_count_is_zero ? "zero" : "absent")
                         : "present";
            row[3] = cl.link.citing;
            row[6] = cl.link.cited;
            if (const DocumentRecord* rec = own.find(cl.link.citing)) {
                row[4] = detail::opt_or_empty(rec->doi);
                row[5] = detail::opt_or_empty(rec->title);
            }
            if (const DocumentRecord* rec = own.find(cl.link.cited)) {
                row[7] = detail::opt_or_empty(rec->doi);
                row[8] = detail::opt_or_empty(rec->title);
            }
            auto fill_match = [&](const std::string& id, std::size_t col) {
                auto it = pairs.find(id);
                if (it == pairs.end()) return;
                const std::string& other_id = own_is_a ? it->second->id_b : it->second->id_a;
                row[col] = other_id;
                row[col + 1] = std::to_string(it->second->step);
                row[col + 2] = format_double(it->second->score.total);
                if (const DocumentRecord* rec = other.find(other_id)) {
                    row[col + 3] = detail::opt_or_empty(rec->doi);
                    row[col + 4] = detail::opt_or_empty(rec->title);
                }
            };
            fill_match(cl.link.citing, 9);
            fill_match(cl.link.cited, 14);
            t.rows.push_back(std::move(row));
        }
    };
    add_rows(diff.only_a_links, "only_a", a, b, by_a, true, seed, &trunc_a);
    add_rows(diff.only_b_links, "only_b", b, a, by_b, false, seed + 1, &trunc_b);
    if (truncated) *truncated = trunc_a || trunc_b;
    return t;
}

/// Config echo + content hashes of the inputs, so any output directory can be
/// traced back to the exact bytes and settings that produced it. Contains no
/// timestamps: reruns must be byte-identical.
inline nlohmann::json run_manifest(const RunConfig& cfg, const std::string& command,
                                   std::size_t records_a, std::size_t records_b,
                                   const std::vector<std::string>& outputs) {
    const ScoreWeights& w = cfg.matcher.weights;
    nlohmann::json manifest;
    manifest["tool"] = kToolName;
    manifest["tool_version"] = kToolVersion;
    manifest["corpus_schema_version"] = kCorpusSchemaVersion;
    manifest["command"] = command;
    manifest["config"] = {
        {"baseline", cfg.baseline},
        {"weights",
         {{"doi", w.doi},
          {"first_author", w.first_author},
          {"title", w.title},
          {"source", w.source},
          {"other", w.other}}},
        {"threshold", w.threshold},
        {"legacy_first_author", w.legacy_first_author},
        {"strip_leading_zeros", cfg.matcher.normalize.strip_leading_zeros},
        {"key_cap", cfg.matcher.blocking.key_cap},
        {"reference_bins", cfg.reference_bins.edges},
        {"citation_bins", cfg.citation_bins.edges},
        {"sampling_seed", cfg.sampling_seed},
        {"sample_size", cfg.sample_size},
        {"max_malformed_fraction", cfg.max_malformed_fraction},
    };
    manifest["inputs"] = {
        {"a",
         {{"path", cfg.path_a},
          {"sha256", cfg.path_a.empty() ? "" : sha256_hex_file(cfg.path_a)},
          {"records", records_a}}},
        {"b",
         {{"path", cfg.path_b},
          {"sha256", cfg.path_b.empty() ? "" : sha256_hex_file(cfg.path_b)},
          {"records", records_b}}},
    };
    manifest["outputs"] = outputs;
    return manifest;
}

inline std::string pretty_json(const nlohmann::json& j) {
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

/// Reconstructs a MatchSet from a previously written match table. Pairs and
/// per-step match counts come from the file; unmatched sets are derived from
/// the corpora. Candidate counts and best-rejected info live only in the
/// match run that produced the table.
inline MatchSet load_match_set(const std::string& matches_csv_path, const Corpus& a,
                               const Corpus& b) {
    auto rows = parse_csv(read_text_file(matches_csv_path));
    if (rows.empty() || rows[0].size() != 9 || rows[0][0] != "id_a")
        throw std::runtime_error("not a match table: " + matches_csv_path);

    MatchSet ms;
    std::unordered_set<std::string> matched_a, matched_b;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 9)
            throw std::runtime_error("bad match table row " + std::to_string(i + 1));
        MatchedPair p;
        p.id_a = r[0];
        p.id_b = r[1];
        p.step = static_cast<int>(parse_double(r[2]));
        p.score.total = parse_double(r[3]);
        p.score.m_doi = parse_double(r[4]);
        p.score.m_first_author = parse_double(r[5]);
        p.score.m_title = parse_double(r[6]);
        p.score.m_source = parse_double(r[7]);
        p.score.m_other = parse_double(r[8]);
        if (p.step >= 1 && p.step <= 6) ++ms.steps[p.step].matches;
        matched_a.insert(p.id_a);
        matched_b.insert(p.id_b);
        ms.pairs.push_back(std::move(p));
    }
    std::sort(ms.pairs.begin(), ms.pairs.end(),
              [](const MatchedPair& x, const MatchedPair& y) { return x.id_a < y.id_a; });

    for (const auto& rec : a.records())
        if (!matched_a.count(rec.record_id)) ms.unmatched_a.push_back(rec.record_id);
    for (const auto& rec : b.records())
        if (!matched_b.count(rec.record_id)) ms.unmatched_b.push_back(rec.record_id);
    std::sort(ms.unmatched_a.begin(), ms.unmatched_a.end());
    ms.unmatched_a.erase(std::unique(ms.unmatched_a.begin(), ms.unmatched_a.end()),
                         ms.unmatched_a.end());
    std::sort(ms.unmatched_b.begin(), ms.unmatched_b.end());
    ms.unmatched_b.erase(std::unique(ms.unmatched_b.begin(), ms.unmatched_b.end()),
                         ms.unmatched_b.end());
    return ms;
}

/// Loads best-rejected candidate columns back from an unmatched table written
/// by the match command, re-attaching them to a reconstructed MatchSet.
inline void load_best_rejected(const std::string& unmatched_csv_path, Perspective side,
                               MatchSet& ms) {
    auto rows = parse_csv(read_text_file(unmatched_csv_path));
    if (rows.empty() || rows[0].size() != 9 || rows[0][0] != "record_id")
        throw std::runtime_error("not an unmatched table: " + unmatched_csv_path);
    auto& best = side == Perspective::a ? ms.best_rejected_a : ms.best_rejected_b;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 9 || r[1].empty()) continue;
        BestCandidate bc;
        bc.other_id = r[1];
        bc.step = static_cast<int>(parse_double(r[2]));
        bc.score.total = parse_double(r[3]);
        bc.score.m_doi = parse_double(r[4]);
        bc.score.m_first_author = parse_double(r[5]);
        bc.score.m_title = parse_double(r[6]);
        bc.score.m_source = parse_double(r[7]);
        bc.score.m_other = parse_double(r[8]);
        best[r[0]] = std::move(bc);
    }
}

}  // namespace biblink
