// Command-line front end for the record-linkage toolkit: corpus validation,
// matching, coverage and citation-link analyses, review sampling, and a
// Crossref harvester. Subcommands communicate through plain files so large
// runs can checkpoint between phases.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biblink/biblink.hpp"
#include "biblink/crossref.hpp"

namespace fs = std::filesystem;
using namespace biblink;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

struct CorpusPair {
    Corpus a;
    Corpus b;
    std::vector<IngestError> errors_a;
    std::vector<IngestError> errors_b;
};

// Loads both corpora, honoring the baseline choice: the baseline file becomes
// corpus A (the side that supplies the step-6 title words). The paths in cfg
// are swapped along with the roles so manifests always describe the file
// that actually played each side.
CorpusPair load_pair(RunConfig& cfg) {
    if (cfg.baseline == "b") {
        std::swap(cfg.path_a, cfg.path_b);
        cfg.baseline = "b (inputs swapped: --a file is side B)";
    }

    IngestOptions opts;
    opts.max_malformed_fraction = cfg.max_malformed_fraction;

    CorpusPair pair;
    opts.corpus_id = cfg.path_a;
    IngestResult ra = ingest_corpus(cfg.path_a, opts);
    opts.corpus_id = cfg.path_b;
    IngestResult rb = ingest_corpus(cfg.path_b, opts);
    pair.a = std::move(ra.corpus);
    pair.b = std::move(rb.corpus);
    pair.errors_a = std::move(ra.errors);
    pair.errors_b = std::move(rb.errors);
    return pair;
}

void report_ingest_errors(const std::string& label, const std::vector<IngestError>& errors) {
    for (const auto& e : errors)
        std::cerr << label << ": line " << e.line_number << ": " << e.message << "\n";
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content,
                std::vector<std::string>& outputs) {
    write_text_file((dir / name).string(), content);
    outputs.push_back(name);
}

void write_manifest(const RunConfig& cfg, const std::string& command, const CorpusPair& pair,
                    const fs::path& dir, std::vector<std::string> outputs,
                    const std::string& name) {
    std::sort(outputs.begin(), outputs.end());
    nlohmann::json manifest =
        run_manifest(cfg, command, pair.a.size(), pair.b.size(), outputs);
    write_text_file((dir / name).string(), pretty_json(manifest));
}

void emit_match_outputs(const RunConfig& cfg, const CorpusPair& pair, const MatchSet& ms,
                        const fs::path& dir, const std::string& manifest_name) {
    std::vector<std::string> outputs;
    write_file(dir, "matches.csv", match_table(ms).to_csv(), outputs);
    write_file(dir, "step_summary.csv", step_summary_table(ms).to_csv(), outputs);
    write_file(dir, "unmatched_a.csv", unmatched_table(ms, Perspective::a).to_csv(), outputs);
    write_file(dir, "unmatched_b.csv", unmatched_table(ms, Perspective::b).to_csv(), outputs);
    write_file(dir, "skipped_keys.csv", skipped_keys_table(ms).to_csv(), outputs);
    outputs.push_back(manifest_name);
    write_manifest(cfg, "match", pair, dir, outputs, manifest_name);
}

void emit_coverage_outputs(const RunConfig& cfg, const CorpusPair& pair, const MatchSet& ms,
                           const fs::path& dir, const std::string& manifest_name) {
    std::vector<std::string> outputs;
    write_file(dir, "coverage_year.csv",
               year_breakdown_table(breakdown_by_year(ms, pair.a, pair.b)).to_csv(), outputs);
    for (Perspective p : {Perspective::a, Perspective::b}) {
        std::string suffix = std::string("_") + to_string(p) + ".csv";
        write_file(dir, "coverage_doctype" + suffix,
                   coverage_table_csv(breakdown_by_doctype(ms, pair.a, pair.b, p)).to_csv(),
                   outputs);
        write_file(dir, "coverage_discipline" + suffix,
                   coverage_table_csv(breakdown_by_discipline(ms, pair.a, pair.b, p)).to_csv(),
                   outputs);
        write_file(dir, "coverage_references" + suffix,
                   coverage_table_csv(breakdown_by_reference_count(ms, pair.a, pair.b, p,
                                                                   cfg.reference_bins))
                       .to_csv(),
                   outputs);
        write_file(dir, "coverage_citations" + suffix,
                   coverage_table_csv(
                       breakdown_by_citation_count(ms, pair.a, pair.b, p, cfg.citation_bins))
                       .to_csv(),
                   outputs);
        LanguageBreakdown lang = breakdown_by_language(ms, pair.a, pair.b, p);
        write_file(dir, "coverage_language" + suffix, coverage_table_csv(lang.per_language).to_csv(),
                   outputs);
        write_file(dir, "coverage_language_rollup" + suffix,
                   language_rollup_table(lang.rollup).to_csv(), outputs);
    }
    write_file(dir, "coverage.json",
               pretty_json(coverage_bundle_json(ms, pair.a, pair.b, cfg.reference_bins,
                                                cfg.citation_bins)),
               outputs);
    outputs.push_back(manifest_name);
    write_manifest(cfg, "coverage", pair, dir, outputs, manifest_name);
}

// Parses "0,10,50" into ascending bin edges; throws on malformed input.
CountBins parse_bins(const std::string& value) {
    CountBins parsed;
    parsed.edges.clear();
    std::size_t pos = 0;
    while (pos < value.size()) {
        std::size_t comma = value.find(',', pos);
        std::string tok =
            value.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) parsed.edges.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (parsed.edges.empty() || !std::is_sorted(parsed.edges.begin(), parsed.edges.end()))
        throw CLI::ValidationError("bins must be a comma-separated ascending list");
    return parsed;
}

void add_matcher_options(CLI::App* cmd, RunConfig& cfg) {
    ScoreWeights& w = cfg.matcher.weights;
    cmd->add_option("--threshold", w.threshold, "Matching-score threshold (strict >)")
        ->capture_default_str();
    cmd->add_option("--w-doi", w.doi, "Weight of the DOI component")->capture_default_str();
    cmd->add_option("--w-first-author", w.first_author, "Weight of the first-author component")
        ->capture_default_str();
    cmd->add_option("--w-title", w.title, "Weight of the title component")
        ->capture_default_str();
    cmd->add_option("--w-source", w.source, "Weight of the source component")
        ->capture_default_str();
    cmd->add_option("--w-other", w.other, "Weight of the numeric-attributes component")
        ->capture_default_str();
    cmd->add_flag("--legacy-first-author", w.legacy_first_author,
                  "Reproduce the published code's first-author formula (known bug)");
    cmd->add_flag("--strip-leading-zeros", cfg.matcher.normalize.strip_leading_zeros,
                  "Compare numeric fields as integers instead of digit strings");
    cmd->add_option("--key-cap", cfg.matcher.blocking.key_cap,
                    "Skip blocking keys whose bucket exceeds this size")
        ->capture_default_str();
    cmd->add_option("--threads", cfg.matcher.threads,
                    "Scoring threads (0 = all hardware threads)")
        ->capture_default_str();
}

void add_input_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--a", cfg.path_a, "Corpus file for side A (NDJSON)")->required();
    cmd->add_option("--b", cfg.path_b, "Corpus file for side B (NDJSON)")->required();
    cmd->add_option("--baseline", cfg.baseline,
                    "Which input is the baseline corpus A: 'a' or 'b'")
        ->check(CLI::IsMember({"a", "b"}))
        ->capture_default_str();
    cmd->add_option("--max-malformed", cfg.max_malformed_fraction,
                    "Abort when the malformed-line fraction exceeds this")
        ->capture_default_str();
}

fs::path prepare_output_dir(const std::string& dir) {
    fs::path out(dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out))
        throw IngestFailure(IngestErrorKind::io, "cannot create output directory: " + dir);
    return out;
}

int run_validate(const std::string& path, double max_malformed) {
    IngestOptions opts;
    opts.corpus_id = path;
    opts.max_malformed_fraction = max_malformed;
    IngestResult result = ingest_corpus(path, opts);
    report_ingest_errors(path, result.errors);

    auto issues = validate_corpus(result.corpus);
    for (const auto& issue : issues)
        std::cout << to_string(issue.kind) << "\t" << issue.record_id << "\t" << issue.detail
                  << "\n";
    std::cerr << path << ": " << result.corpus.size() << " records, " << result.errors.size()
              << " malformed lines, " << issues.size() << " validation issues\n";
    return issues.empty() && result.errors.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biblink - match bibliographic corpora and compare their coverage "
                 "and citation links"};
    app.require_subcommand(1);

    RunConfig cfg;

    // validate
    std::string validate_path;
    auto* cmd_validate = app.add_subcommand("validate", "Check one corpus file for problems");
    cmd_validate->add_option("corpus", validate_path, "NDJSON corpus file")->required();
    cmd_validate
        ->add_option("--max-malformed", cfg.max_malformed_fraction,
                     "Abort when the malformed-line fraction exceeds this")
        ->capture_default_str();

    // match
    auto* cmd_match = app.add_subcommand("match", "Run the six-step matching procedure");
    add_input_options(cmd_match, cfg);
    add_matcher_options(cmd_match, cfg);
    cmd_match->add_option("--out", cfg.output_dir, "Output directory")->required();

    // coverage
    std::string matches_path;
    auto* cmd_coverage = app.add_subcommand("coverage", "Coverage breakdowns from a match table");
    add_input_options(cmd_coverage, cfg);
    cmd_coverage->add_option("--matches", matches_path, "matches.csv from a match run")
        ->required();
    std::string ref_bins_text, cite_bins_text;
    cmd_coverage->add_option("--ref-bins", ref_bins_text,
                             "Reference-count bin edges, e.g. 0,10,50");
    cmd_coverage->add_option("--cite-bins", cite_bins_text,
                             "Citation-count bin edges, e.g. 0,5,25");
    cmd_coverage->add_option("--out", cfg.output_dir, "Output directory")->required();

    // citediff
    auto* cmd_citediff =
        app.add_subcommand("citediff", "Citation-link overlap restricted to co-covered documents");
    add_input_options(cmd_citediff, cfg);
    cmd_citediff->add_option("--matches", matches_path, "matches.csv from a match run")
        ->required();
    cmd_citediff->add_option("--out", cfg.output_dir, "Output directory")->required();

    // sample
    auto* cmd_sample = app.add_subcommand("sample", "Draw seeded review worksheets");
    cmd_sample->require_subcommand(1);
    std::string sample_side = "a";
    std::string sample_out;
    std::string unmatched_csv;
    auto* cmd_sample_unmatched =
        cmd_sample->add_subcommand("unmatched", "Sample unmatched records of one side");
    add_input_options(cmd_sample_unmatched, cfg);
    cmd_sample_unmatched->add_option("--matches", matches_path, "matches.csv from a match run")
        ->required();
    cmd_sample_unmatched
        ->add_option("--unmatched-csv", unmatched_csv,
                     "unmatched_<side>.csv from the same run (restores best-candidate columns)");
    cmd_sample_unmatched->add_option("--side", sample_side, "Which side to sample: 'a' or 'b'")
        ->check(CLI::IsMember({"a", "b"}))
        ->capture_default_str();
    cmd_sample_unmatched->add_option("--n", cfg.sample_size, "Sample size")
        ->capture_default_str();
    cmd_sample_unmatched->add_option("--seed", cfg.sampling_seed, "Sampling seed")
        ->capture_default_str();
    cmd_sample_unmatched->add_option("--out", sample_out, "Worksheet CSV path")->required();

    auto* cmd_sample_disc = cmd_sample->add_subcommand(
        "discrepancies", "Sample one-sided citation links from both directions");
    add_input_options(cmd_sample_disc, cfg);
    cmd_sample_disc->add_option("--matches", matches_path, "matches.csv from a match run")
        ->required();
    cmd_sample_disc->add_option("--n", cfg.sample_size, "Sample size per direction")
        ->capture_default_str();
    cmd_sample_disc->add_option("--seed", cfg.sampling_seed, "Sampling seed")
        ->capture_default_str();
    cmd_sample_disc->add_option("--out", sample_out, "Worksheet CSV path")->required();

    // harvest
    HarvestOptions harvest;
    std::string harvest_out;
    bool harvest_no_resolve = false;
    auto* cmd_harvest = app.add_subcommand("harvest", "Harvest works from the Crossref API");
    cmd_harvest->add_option("--out", harvest_out, "Output NDJSON corpus file")->required();
    cmd_harvest->add_option("--mailto", harvest.mailto, "Contact address (polite pool)")
        ->required();
    cmd_harvest->add_option("--from-pub-date", harvest.from_pub_date, "Filter: YYYY-MM-DD");
    cmd_harvest->add_option("--until-pub-date", harvest.until_pub_date, "Filter: YYYY-MM-DD");
    cmd_harvest->add_option("--prefix", harvest.doi_prefix, "Filter: DOI prefix");
    cmd_harvest->add_option("--rows", harvest.rows_per_page, "Works per page")
        ->capture_default_str();
    cmd_harvest->add_option("--max", harvest.max_works, "Stop after this many works (0 = all)")
        ->capture_default_str();
    cmd_harvest->add_option("--retries", harvest.max_retries, "Retries per request")
        ->capture_default_str();
    cmd_harvest->add_option("--cursor-file", harvest.cursor_file,
                            "Save/restore pagination cursor here (enables resume)");
    cmd_harvest->add_option("--base-url", harvest.base_url, "API base URL")
        ->capture_default_str();
    cmd_harvest->add_flag("--no-resolve-references", harvest_no_resolve,
                          "Skip the final pass that restricts references to harvested records");

    // report
    auto* cmd_report =
        app.add_subcommand("report", "Full pipeline: match, coverage, citediff, worksheets");
    add_input_options(cmd_report, cfg);
    add_matcher_options(cmd_report, cfg);
    cmd_report->add_option("--ref-bins", ref_bins_text,
                           "Reference-count bin edges, e.g. 0,10,50");
    cmd_report->add_option("--cite-bins", cite_bins_text,
                           "Citation-count bin edges, e.g. 0,5,25");
    cmd_report->add_option("--n", cfg.sample_size, "Worksheet sample size")
        ->capture_default_str();
    cmd_report->add_option("--seed", cfg.sampling_seed, "Sampling seed")->capture_default_str();
    cmd_report->add_option("--out", cfg.output_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
        if (!ref_bins_text.empty()) cfg.reference_bins = parse_bins(ref_bins_text);
        if (!cite_bins_text.empty()) cfg.citation_bins = parse_bins(cite_bins_text);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cmd_validate->parsed()) return run_validate(validate_path, cfg.max_malformed_fraction);

        if (cmd_match->parsed()) {
            CorpusPair pair = load_pair(cfg);
            report_ingest_errors("a", pair.errors_a);
            report_ingest_errors("b", pair.errors_b);
            MatchSet ms = match_corpora(pair.a, pair.b, cfg.matcher);
            fs::path dir = prepare_output_dir(cfg.output_dir);
            emit_match_outputs(cfg, pair, ms, dir, "manifest_match.json");
            std::cerr << "matched " << ms.pairs.size() << " pairs ("
                      << pair.a.size() << " x " << pair.b.size() << " records)\n";
            return kExitOk;
        }

        if (cmd_coverage->parsed()) {
            CorpusPair pair = load_pair(cfg);
            MatchSet ms = load_match_set(matches_path, pair.a, pair.b);
            fs::path dir = prepare_output_dir(cfg.output_dir);
            emit_coverage_outputs(cfg, pair, ms, dir, "manifest_coverage.json");
            return kExitOk;
        }

        if (cmd_citediff->parsed()) {
            CorpusPair pair = load_pair(cfg);
            MatchSet ms = load_match_set(matches_path, pair.a, pair.b);
            LinkDiff diff = diff_links(pair.a, pair.b, ms);
            fs::path dir = prepare_output_dir(cfg.output_dir);
            std::vector<std::string> outputs;
            write_file(dir, "linkdiff.json", pretty_json(linkdiff_json(diff)), outputs);
            outputs.push_back("manifest_citediff.json");
            write_manifest(cfg, "citediff", pair, dir, outputs, "manifest_citediff.json");
            std::cerr << "shared " << diff.shared << ", only_a " << diff.only_a << " ("
                      << format_double(diff.pct_only_a()) << "%), only_b " << diff.only_b << " ("
                      << format_double(diff.pct_only_b()) << "%)\n";
            return kExitOk;
        }

        if (cmd_sample_unmatched->parsed()) {
            CorpusPair pair = load_pair(cfg);
            MatchSet ms = load_match_set(matches_path, pair.a, pair.b);
            Perspective side = sample_side == "b" ? Perspective::b : Perspective::a;
            if (!unmatched_csv.empty()) load_best_rejected(unmatched_csv, side, ms);
            bool truncated = false;
            Table ws = unmatched_worksheet(ms, pair.a, pair.b, side, cfg.sample_size,
                                           cfg.sampling_seed, &truncated);
            if (truncated)
                std::cerr << "note: requested sample exceeds the unmatched population; "
                             "returning everything\n";
            write_text_file(sample_out, ws.to_csv());
            return kExitOk;
        }

        if (cmd_sample_disc->parsed()) {
            CorpusPair pair = load_pair(cfg);
            MatchSet ms = load_match_set(matches_path, pair.a, pair.b);
            LinkDiff diff = diff_links(pair.a, pair.b, ms);
            bool truncated = false;
            Table ws = discrepancy_worksheet(diff, pair.a, pair.b, ms, cfg.sample_size,
                                             cfg.sampling_seed, &truncated);
            if (truncated)
                std::cerr << "note: requested sample exceeds a discrepancy population; "
                             "returning everything\n";
            write_text_file(sample_out, ws.to_csv());
            return kExitOk;
        }

        if (cmd_harvest->parsed()) {
            bool resuming = !harvest.cursor_file.empty() && fs::exists(harvest.cursor_file);
            std::ofstream out(harvest_out,
                              resuming ? std::ios::app | std::ios::binary
                                       : std::ios::trunc | std::ios::binary);
            if (!out)
                throw IngestFailure(IngestErrorKind::io, "cannot write: " + harvest_out);
            HarvestStats stats = harvest_crossref(harvest, out);
            out.close();
            if (!harvest_no_resolve) resolve_harvested_references(harvest_out);
            std::cerr << "harvested " << stats.written << " records over " << stats.pages
                      << " pages (" << stats.excluded << " excluded)\n";
            return kExitOk;
        }

        if (cmd_report->parsed()) {
            CorpusPair pair = load_pair(cfg);
            report_ingest_errors("a", pair.errors_a);
            report_ingest_errors("b", pair.errors_b);
            for (const auto& issue : validate_corpus(pair.a))
                std::cerr << "a: " << to_string(issue.kind) << " " << issue.record_id << "\n";
            for (const auto& issue : validate_corpus(pair.b))
                std::cerr << "b: " << to_string(issue.kind) << " " << issue.record_id << "\n";

            MatchSet ms = match_corpora(pair.a, pair.b, cfg.matcher);
            LinkDiff diff = diff_links(pair.a, pair.b, ms);
            fs::path dir = prepare_output_dir(cfg.output_dir);

            emit_match_outputs(cfg, pair, ms, dir, "manifest_match.json");
            emit_coverage_outputs(cfg, pair, ms, dir, "manifest_coverage.json");
            std::vector<std::string> outputs;
            write_file(dir, "linkdiff.json", pretty_json(linkdiff_json(diff)), outputs);
            write_file(dir, "worksheet_unmatched_a.csv",
                       unmatched_worksheet(ms, pair.a, pair.b, Perspective::a, cfg.sample_size,
                                           cfg.sampling_seed)
                           .to_csv(),
                       outputs);
            write_file(dir, "worksheet_unmatched_b.csv",
                       unmatched_worksheet(ms, pair.a, pair.b, Perspective::b, cfg.sample_size,
                                           cfg.sampling_seed)
                           .to_csv(),
                       outputs);
            write_file(dir, "worksheet_discrepancies.csv",
                       discrepancy_worksheet(diff, pair.a, pair.b, ms, cfg.sample_size,
                                             cfg.sampling_seed)
                           .to_csv(),
                       outputs);
            outputs.push_back("manifest.json");
            write_manifest(cfg, "report", pair, dir, outputs, "manifest.json");
            std::cerr << "report written to " << dir.string() << "\n";
            return kExitOk;
        }
    } catch (const IngestFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == IngestErrorKind::io ? kExitIo : kExitValidation;
    } catch (const HarvestFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}
