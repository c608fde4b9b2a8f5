#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "biblink/blocking.hpp"
#include "biblink/model.hpp"
#include "biblink/normalize.hpp"
#include "biblink/similarity.hpp"

namespace biblink {

struct MatchedPair {
    std::string id_a;
    std::string id_b;
    int step = 0;
    ScoreBreakdown score;
};

/// The best-scoring candidate a record was ever paired with but not matched
/// to. For unmatched records this is the evidence a reviewer needs to judge
/// whether the procedure missed a true match.
struct BestCandidate {
    std::string other_id;
    int step = 0;
    ScoreBreakdown score;
};

struct StepStats {
    std::size_t candidates = 0;
    std::size_t matches = 0;
};

/// The final one-to-one mapping plus everything needed to report on it:
/// per-step counts, skipped blocking keys, and the best rejected candidate of
/// every record that ended up unmatched.
struct MatchSet {
    std::vector<MatchedPair> pairs;            // sorted by id_a
    std::vector<std::string> unmatched_a;      // sorted
    std::vector<std::string> unmatched_b;      // sorted
    std::array<StepStats, 7> steps{};          // index 1..6 used
    std::vector<SkippedKey> skipped_keys;
    std::unordered_map<std::string, BestCandidate> best_rejected_a;
    std::unordered_map<std::string, BestCandidate> best_rejected_b;
};

struct MatcherConfig {
    ScoreWeights weights;
    BlockingConfig blocking;
    NormalizeOptions normalize;
    unsigned threads = 0;  // 0 = hardware_concurrency
};

/// Mutable state threaded through the six matching steps. Exposed so single
/// steps can be driven and inspected directly.
struct MatchState {
    std::vector<NormalizedRecord> norm_a;
    std::vector<NormalizedRecord> norm_b;
    std::vector<const NormalizedRecord*> free_a;  // sorted by record_id
    std::vector<const NormalizedRecord*> free_b;
    MatchSet result;
};

namespace detail {

inline std::vector<const NormalizedRecord*> sorted_refs(
    const std::vector<NormalizedRecord>& records) {
    std::vector<const NormalizedRecord*> refs;
    refs.reserve(records.size());
    for (const auto& r : records) refs.push_back(&r);
    std::sort(refs.begin(), refs.end(), [](const NormalizedRecord* x, const NormalizedRecord* y) {
        return x->record_id < y->record_id;
    });
    return refs;
}

inline std::vector<ScoreBreakdown> score_candidates(
    const std::vector<CandidatePair>& candidates,
    const std::unordered_map<std::string_view, const NormalizedRecord*>& lookup_a,
    const std::unordered_map<std::string_view, const NormalizedRecord*>& lookup_b,
    const ScoreWeights& weights, unsigned threads) {
    std::vector<ScoreBreakdown> scores(candidates.size());
    auto score_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& c = candidates[i];
            scores[i] = matching_score(*lookup_a.at(c.id_a), *lookup_b.at(c.id_b), weights);
        }
    };

    unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    if (n <= 1 || candidates.size() < 2048) {
        score_range(0, candidates.size());
        return scores;
    }
    std::vector<std::thread> workers;
    std::size_t chunk = (candidates.size() + n - 1) / n;
    for (unsigned t = 0; t < n; ++t) {
        std::size_t begin = std::min(candidates.size(), t * chunk);
        std::size_t end = std::min(candidates.size(), begin + chunk);
        if (begin < end) workers.emplace_back(score_range, begin, end);
    }
    for (auto& w : workers) w.join();
    return scores;
}

inline void note_best_candidate(std::unordered_map<std::string, BestCandidate>& best,
                                const std::string& id, const std::string& other, int step,
                                const ScoreBreakdown& score) {
    auto it = best.find(id);
    if (it == best.end()) {
        best.emplace(id, BestCandidate{other, step, score});
        return;
    }
    BestCandidate& cur = it->second;
    if (score.total > cur.score.total ||
        (score.total == cur.score.total && step == cur.step && other < cur.other_id))
        cur = {other, step, score};
}

}  // namespace detail

inline MatchState make_match_state(const Corpus& a, const Corpus& b,
                                   const MatcherConfig& cfg = {}) {
    MatchState st;
    st.norm_a = normalize_corpus(a, cfg.normalize);
    st.norm_b = normalize_corpus(b, cfg.normalize);
    st.free_a = detail::sorted_refs(st.norm_a);
    st.free_b = detail::sorted_refs(st.norm_b);
    return st;
}

/// Runs one matching step: generate candidates among still-free records,
/// score them, drop totals at or below the threshold, then greedily accept
/// the highest-scoring pair whose endpoints are both free (ties broken by
/// lower id_a, then lower id_b). Matched records leave the free sets and are
/// excluded from all later steps.
inline void run_step(MatchState& st, int step, const MatcherConfig& cfg = {}) {
    auto candidates = generate_candidates(step, st.free_a, st.free_b, cfg.blocking,
                                          &st.result.skipped_keys);
    st.result.steps[step].candidates = candidates.size();
    if (candidates.empty()) return;

    std::unordered_map<std::string_view, const NormalizedRecord*> lookup_a, lookup_b;
    lookup_a.reserve(st.free_a.size());
    lookup_b.reserve(st.free_b.size());
    for (const NormalizedRecord* r : st.free_a) lookup_a.emplace(r->record_id, r);
    for (const NormalizedRecord* r : st.free_b) lookup_b.emplace(r->record_id, r);

    auto scores =
        detail::score_candidates(candidates, lookup_a, lookup_b, cfg.weights, cfg.threads);

    // Candidates are in canonical (id_a, id_b) order, so this bookkeeping is
    // deterministic no matter how scoring was parallelized.
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        detail::note_best_candidate(st.result.best_rejected_a, candidates[i].id_a,
                                    candidates[i].id_b, step, scores[i]);
        detail::note_best_candidate(st.result.best_rejected_b, candidates[i].id_b,
                                    candidates[i].id_a, step, scores[i]);
    }

    std::vector<std::size_t> order;
    order.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (scores[i].total > cfg.weights.threshold) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (scores[x].total != scores[y].total) return scores[x].total > scores[y].total;
        if (candidates[x].id_a != candidates[y].id_a)
            return candidates[x].id_a < candidates[y].id_a;
        return candidates[x].id_b < candidates[y].id_b;
    });

    std::unordered_set<std::string_view> matched_a, matched_b;
    for (std::size_t i : order) {
        const auto& c = candidates[i];
        if (matched_a.count(c.id_a) || matched_b.count(c.id_b)) continue;
        matched_a.insert(c.id_a);
        matched_b.insert(c.id_b);
        st.result.pairs.push_back({c.id_a, c.id_b, step, scores[i]});
        ++st.result.steps[step].matches;
    }

    auto prune = [](std::vector<const NormalizedRecord*>& free_side,
                    const std::unordered_set<std::string_view>& matched) {
        if (matched.empty()) return;
        free_side.erase(std::remove_if(free_side.begin(), free_side.end(),
                                       [&](const NormalizedRecord* r) {
                                           return matched.count(r->record_id) != 0;
                                       }),
                        free_side.end());
    };
    prune(st.free_a, matched_a);
    prune(st.free_b, matched_b);
}

/// The whole six-step procedure. The returned MatchSet is canonical: pairs
/// sorted by id_a, unmatched lists sorted, and the same bytes come out for
/// any input permutation or thread count.
inline MatchSet match_corpora(const Corpus& a, const Corpus& b, const MatcherConfig& cfg = {}) {
    MatchState st = make_match_state(a, b, cfg);
    for (int step = 1; step <= 6; ++step) run_step(st, step, cfg);

    MatchSet ms = std::move(st.result);
    std::sort(ms.pairs.begin(), ms.pairs.end(), [](const MatchedPair& x, const MatchedPair& y) {
        return x.id_a < y.id_a;
    });
    for (const NormalizedRecord* r : st.free_a) ms.unmatched_a.push_back(r->record_id);
    for (const NormalizedRecord* r : st.free_b) ms.unmatched_b.push_back(r->record_id);

    // Best-rejected info is only meaningful (and only reported) for records
    // that ended up unmatched.
    std::unordered_set<std::string_view> keep_a(ms.unmatched_a.begin(), ms.unmatched_a.end());
    std::unordered_set<std::string_view> keep_b(ms.unmatched_b.begin(), ms.unmatched_b.end());
    std::erase_if(ms.best_rejected_a, [&](const auto& kv) { return !keep_a.count(kv.first); });
    std::erase_if(ms.best_rejected_b, [&](const auto& kv) { return !keep_b.count(kv.first); });
    return ms;
}

}  // namespace biblink
