#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "biblink/normalize.hpp"

namespace biblink {

/// A pair of records some blocking step proposed for scoring. step records
/// which of the six steps produced it.
struct CandidatePair {
    std::string id_a;
    std::string id_b;
    int step = 0;

    friend bool operator==(const CandidatePair& x, const CandidatePair& y) {
        return x.step == y.step && x.id_a == y.id_a && x.id_b == y.id_b;
    }
    friend bool operator<(const CandidatePair& x, const CandidatePair& y) {
        if (x.id_a != y.id_a) return x.id_a < y.id_a;
        return x.id_b < y.id_b;
    }
};

struct BlockingConfig {
    // A blocking key matching more records than this on one side is skipped
    // (and reported) instead of producing a quadratic candidate blow-up.
    std::size_t key_cap = 10000;
};

/// One blocking key that was skipped because its bucket exceeded the cap.
/// Skipped keys mean lost recall, so they are always surfaced in reports.
struct SkippedKey {
    int step = 0;
    std::string key;
    char side = 'a';
    std::size_t bucket_size = 0;
};

namespace detail {

constexpr char kKeySep = '\x1F';

// Whitespace tokens with non-alphanumeric characters stripped from the edges.
inline std::vector<std::string> tokenize_title(std::string_view title_norm) {
    std::vector<std::string> tokens;
    auto is_word_char = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
    std::size_t i = 0;
    while (i < title_norm.size()) {
        while (i < title_norm.size() && title_norm[i] == ' ') ++i;
        std::size_t start = i;
        while (i < title_norm.size() && title_norm[i] != ' ') ++i;
        std::string_view tok = title_norm.substr(start, i - start);
        while (!tok.empty() && !is_word_char(tok.front())) tok.remove_prefix(1);
        while (!tok.empty() && !is_word_char(tok.back())) tok.remove_suffix(1);
        if (!tok.empty()) tokens.emplace_back(tok);
    }
    return tokens;
}

inline void append_page_alternatives(const NormalizedRecord& rec, const std::string& prefix,
                                     std::vector<std::string>& keys) {
    // "Either begin page or article number": one key per available
    // alternative, namespaced so equal digit strings cannot collide across
    // the two meanings.
    if (rec.begin_page_num) keys.push_back(prefix + 'p' + *rec.begin_page_num);
    if (rec.article_number_num) keys.push_back(prefix + 'a' + *rec.article_number_num);
}

}  // namespace detail

/// Tokenizes a normalized title on whitespace (punctuation stripped from the
/// token edges) and returns the words a step-6 block is keyed on: all tokens
/// when there are at most three, otherwise the three longest with ties broken
/// by earlier position.
inline std::vector<std::string> three_longest_title_words(std::string_view title_norm) {
    std::vector<std::string> tokens = detail::tokenize_title(title_norm);
    if (tokens.size() <= 3) return tokens;

    std::vector<std::size_t> order(tokens.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return tokens[x].size() > tokens[y].size();
    });
    return {tokens[order[0]], tokens[order[1]], tokens[order[2]]};
}

/// Blocking keys of one record for steps 1-5; a record missing any required
/// component yields no key for that step. For step 6 the returned strings are
/// the record's three-longest title words (the A-side key set; step-6
/// matching is containment, not key equality).
inline std::vector<std::string> step_keys(int step, const NormalizedRecord& rec) {
    using detail::kKeySep;
    std::vector<std::string> keys;
    if (step == 6) {
        if (rec.title_norm) keys = three_longest_title_words(*rec.title_norm);
        return keys;
    }
    if (!rec.year_num) return keys;
    const std::string& year = *rec.year_num;

    switch (step) {
        case 1:
            if (rec.doi_norm) keys.push_back(year + kKeySep + *rec.doi_norm);
            break;
        case 2:
            if (rec.volume_num)
                detail::append_page_alternatives(rec, year + kKeySep + *rec.volume_num + kKeySep,
                                                 keys);
            break;
        case 3:
            if (rec.first_author_last)
                detail::append_page_alternatives(
                    rec, year + kKeySep + *rec.first_author_last + kKeySep, keys);
            break;
        case 4:
            if (rec.first_author_last && rec.volume_num)
                keys.push_back(year + kKeySep + *rec.first_author_last + kKeySep +
                               *rec.volume_num);
            break;
        case 5:
            for (const auto& issn : rec.issns_norm)
                detail::append_page_alternatives(
                    rec, year + kKeySep + "issn:" + issn + kKeySep, keys);
            for (const auto& isbn : rec.isbns_norm)
                detail::append_page_alternatives(
                    rec, year + kKeySep + "isbn:" + isbn + kKeySep, keys);
            break;
        default:
            break;
    }
    return keys;
}

namespace detail {

using RecordRefs = std::vector<const NormalizedRecord*>;

inline std::unordered_map<std::string, std::vector<const NormalizedRecord*>> bucket_by_key(
    int step, const RecordRefs& records) {
    std::unordered_map<std::string, std::vector<const NormalizedRecord*>> buckets;
    for (const NormalizedRecord* rec : records)
        for (auto& key : step_keys(step, *rec)) buckets[std::move(key)].push_back(rec);
    return buckets;
}

inline void sort_and_dedupe(std::vector<CandidatePair>& pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end(),
                            [](const CandidatePair& x, const CandidatePair& y) {
                                return x.id_a == y.id_a && x.id_b == y.id_b;
                            }),
                pairs.end());
}

inline std::vector<CandidatePair> candidates_keyed(int step, const RecordRefs& side_a,
                                                   const RecordRefs& side_b,
                                                   const BlockingConfig& cfg,
                                                   std::vector<SkippedKey>* skipped) {
    auto buckets_a = bucket_by_key(step, side_a);
    auto buckets_b = bucket_by_key(step, side_b);

    std::vector<CandidatePair> pairs;
    std::vector<SkippedKey> local_skips;
    for (const auto& [key, bucket_a] : buckets_a) {
        auto it = buckets_b.find(key);
        if (it == buckets_b.end()) continue;
        const auto& bucket_b = it->second;
        if (bucket_a.size() > cfg.key_cap) {
            local_skips.push_back({step, key, 'a', bucket_a.size()});
            continue;
        }
        if (bucket_b.size() > cfg.key_cap) {
            local_skips.push_back({step, key, 'b', bucket_b.size()});
            continue;
        }
        for (const NormalizedRecord* a : bucket_a)
            for (const NormalizedRecord* b : bucket_b)
                pairs.push_back({a->record_id, b->record_id, step});
    }
    sort_and_dedupe(pairs);
    if (skipped) {
        std::sort(local_skips.begin(), local_skips.end(),
                  [](const SkippedKey& x, const SkippedKey& y) {
                      if (x.key != y.key) return x.key < y.key;
                      return x.side < y.side;
                  });
        skipped->insert(skipped->end(), local_skips.begin(), local_skips.end());
    }
    return pairs;
}

// Step 6 is directional: the baseline (A) record supplies its three longest
// title words, and a pair is emitted iff all of them occur among the tokens
// of the B title. Implemented with an inverted token index over B; per A
// record only the shortest posting list is scanned.
inline std::vector<CandidatePair> candidates_title_words(const RecordRefs& side_a,
                                                         const RecordRefs& side_b,
                                                         const BlockingConfig& cfg,
                                                         std::vector<SkippedKey>* skipped) {
    std::vector<std::vector<std::string>> b_tokens(side_b.size());
    std::unordered_map<std::string_view, std::vector<std::size_t>> postings;
    for (std::size_t bi = 0; bi < side_b.size(); ++bi) {
        if (!side_b[bi]->title_norm) continue;
        auto toks = tokenize_title(*side_b[bi]->title_norm);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        b_tokens[bi] = std::move(toks);
        for (const auto& tok : b_tokens[bi]) postings[tok].push_back(bi);
    }

    std::vector<CandidatePair> pairs;
    std::vector<SkippedKey> local_skips;
    for (const NormalizedRecord* a : side_a) {
        if (!a->title_norm) continue;
        auto words = three_longest_title_words(*a->title_norm);
        if (words.empty()) continue;

        const std::vector<std::size_t>* smallest = nullptr;
        bool all_present = true;
        for (const auto& w : words) {
            auto it = postings.find(std::string_view(w));
            if (it == postings.end()) {
                all_present = false;
                break;
            }
            if (!smallest || it->second.size() < smallest->size()) smallest = &it->second;
        }
        if (!all_present) continue;
        if (smallest->size() > cfg.key_cap) {
            local_skips.push_back({6, words[0], 'b', smallest->size()});
            continue;
        }
        for (std::size_t bi : *smallest) {
            const auto& toks = b_tokens[bi];
            bool ok = true;
            for (const auto& w : words)
                if (!std::binary_search(toks.begin(), toks.end(), w)) {
                    ok = false;
                    break;
                }
            if (ok) pairs.push_back({a->record_id, side_b[bi]->record_id, 6});
        }
    }
    sort_and_dedupe(pairs);
    if (skipped) {
        std::sort(local_skips.begin(), local_skips.end(),
                  [](const SkippedKey& x, const SkippedKey& y) { return x.key < y.key; });
        local_skips.erase(std::unique(local_skips.begin(), local_skips.end(),
                                      [](const SkippedKey& x, const SkippedKey& y) {
                                          return x.key == y.key;
                                      }),
                          local_skips.end());
        skipped->insert(skipped->end(), local_skips.begin(), local_skips.end());
    }
    return pairs;
}

}  // namespace detail

/// Candidate pairs of one blocking step over the two unmatched sets. Each
/// pair appears once even when it shares several keys, and the output is
/// sorted by (id_a, id_b) regardless of input order.
inline std::vector<CandidatePair> generate_candidates(
    int step, const std::vector<const NormalizedRecord*>& unmatched_a,
    const std::vector<const NormalizedRecord*>& unmatched_b, const BlockingConfig& cfg = {},
    std::vector<SkippedKey>* skipped = nullptr) {
    if (step == 6) return detail::candidates_title_words(unmatched_a, unmatched_b, cfg, skipped);
    return detail::candidates_keyed(step, unmatched_a, unmatched_b, cfg, skipped);
}

}  // namespace biblink
