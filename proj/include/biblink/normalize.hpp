#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biblink/model.hpp"

namespace biblink {

/// A document reduced to the exact attribute forms the matcher compares:
/// digit-only numbering fields, US-ASCII lowercase text fields, and the first
/// author split into last name and first initial. This is the only form the
/// blocking and scoring code ever sees.
struct NormalizedRecord {
    std::string record_id;
    std::optional<std::string> doi_norm;
    std::optional<std::string> first_author_last;
    std::optional<char> first_author_initial;
    std::optional<std::string> title_norm;
    std::vector<std::string> source_title_variants_norm;
    std::vector<std::string> issns_norm;
    std::vector<std::string> isbns_norm;
    std::optional<std::string> year_num;
    std::optional<std::string> volume_num;
    std::optional<std::string> issue_num;
    std::optional<std::string> begin_page_num;
    std::optional<std::string> end_page_num;
    std::optional<std::string> article_number_num;
};

struct NormalizeOptions {
    // Compare numeric fields as digit strings ("012" != "12") by default.
    // Stripping leading zeros makes them behave like integers instead.
    bool strip_leading_zeros = false;
};

/// Keeps only the decimal digits of raw, in order. Absent when raw is absent
/// or contains no digit.
inline std::optional<std::string> normalize_numeric(const std::optional<std::string>& raw,
                                                    const NormalizeOptions& opts = {}) {
    if (!raw) return std::nullopt;
    std::string digits;
    for (char c : *raw)
        if (c >= '0' && c <= '9') digits.push_back(c);
    if (opts.strip_leading_zeros) {
        std::size_t nz = digits.find_first_not_of('0');
        digits = nz == std::string::npos ? (digits.empty() ? digits : std::string("0"))
                                         : digits.substr(nz);
    }
    if (digits.empty()) return std::nullopt;
    return digits;
}

namespace detail {

// Decodes one UTF-8 sequence starting at s[i], advancing i. Malformed bytes
// consume one byte and yield the replacement value, which has no mapping and
// therefore gets dropped by the fold.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    auto cont = [&](std::size_t k) {
        return k < s.size() && (byte(k) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
        char32_t cp = (char32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
        i += 2;
        return cp < 0x80 ? 0xFFFD : cp;  // reject overlong
    }
    if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        char32_t cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(byte(i + 1) & 0x3F) << 6) |
                      (byte(i + 2) & 0x3F);
        i += 3;
        return (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) ? 0xFFFD : cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(i + 1) & 0x3F) << 12) |
                      (char32_t(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
        i += 4;
        return (cp < 0x10000 || cp > 0x10FFFF) ? 0xFFFD : cp;
    }
    ++i;
    return 0xFFFD;
}

struct FoldEntry {
    char32_t cp;
    const char* out;  // lowercase ASCII replacement
};

// Fixed transliteration table for codepoints whose replacement is not the
// plain "strip the diacritic" rule handled by the range maps below. Sorted by
// codepoint; shipped with the artifact so results are identical everywhere.
inline const FoldEntry* special_fold_table(std::size_t& count) {
    static constexpr FoldEntry table[] = {
        {0x00B2, "2"},  {0x00B3, "3"},  {0x00B9, "1"},
        {0x00C6, "ae"}, {0x00D0, "d"},  {0x00D8, "o"},  {0x00DE, "th"},
        {0x00DF, "ss"}, {0x00E6, "ae"}, {0x00F0, "d"},  {0x00F8, "o"},
        {0x00FE, "th"}, {0x0110, "d"},  {0x0111, "d"},  {0x0126, "h"},  {0x0127, "h"},
        {0x0131, "i"},  {0x0132, "ij"}, {0x0133, "ij"}, {0x0138, "k"},  {0x013F, "l"},
        {0x0140, "l"},  {0x0141, "l"},  {0x0142, "l"},  {0x0149, "n"},  {0x014A, "n"},
        {0x014B, "n"},  {0x0152, "oe"}, {0x0153, "oe"}, {0x0166, "t"},  {0x0167, "t"},
        {0x017F, "s"},  {0x0180, "b"},  {0x0189, "d"},  {0x0191, "f"},  {0x0192, "f"},
        {0x0197, "i"},  {0x019A, "l"},  {0x019F, "o"},  {0x01A0, "o"},  {0x01A1, "o"},
        {0x01AB, "t"},  {0x01AF, "u"},  {0x01B0, "u"},  {0x01B5, "z"},  {0x01B6, "z"},
        {0x01C4, "dz"}, {0x01C5, "dz"}, {0x01C6, "dz"}, {0x01C7, "lj"}, {0x01C8, "lj"},
        {0x01C9, "lj"}, {0x01CA, "nj"}, {0x01CB, "nj"}, {0x01CC, "nj"}, {0x01E2, "ae"},
        {0x01E3, "ae"}, {0x01E4, "g"},  {0x01E5, "g"},  {0x01F1, "dz"}, {0x01F2, "dz"},
        {0x01F3, "dz"}, {0x01FC, "ae"}, {0x01FD, "ae"}, {0x01FE, "o"},  {0x01FF, "o"},
        {0x0221, "d"},  {0x0234, "l"},  {0x0235, "n"},  {0x0237, "j"},
        {0x1D62, "i"},  {0x1D63, "r"},  {0x1D64, "u"},  {0x1D65, "v"},
        {0x1E9C, "s"},  {0x1E9D, "s"},  {0x1E9E, "ss"}, {0x1E9F, "d"},
        {0x1EFA, "ll"}, {0x1EFB, "ll"}, {0x1EFC, "v"},  {0x1EFD, "v"},
        {0x1EFE, "y"},  {0x1EFF, "y"},
        {0x2018, "'"},  {0x2019, "'"},  {0x201C, "\""}, {0x201D, "\""}, {0x2026, "..."},
        {0x2070, "0"},  {0x2071, "i"},  {0x207F, "n"},
        {0xFB00, "ff"}, {0xFB01, "fi"}, {0xFB02, "fl"}, {0xFB03, "ffi"}, {0xFB04, "ffl"},
        {0xFB05, "st"}, {0xFB06, "st"},
    };
    count = sizeof(table) / sizeof(table[0]);
    return table;
}

struct FoldRange {
    char32_t first;
    char32_t last;
    const char* bases;  // one base letter per codepoint in [first, last]
};

// Diacritic-stripping maps for the Latin blocks where every codepoint folds
// to a single ASCII base letter. One character per codepoint.
inline const FoldRange* range_fold_table(std::size_t& count) {
    static constexpr FoldRange table[] = {
        // Latin-1 Supplement letters (Æ Ð × Ø Þ ß æ ð ÷ ø þ handled above).
        {0x00C0, 0x00C5, "aaaaaa"},
        {0x00C7, 0x00CF, "ceeeeiiii"},
        {0x00D1, 0x00D6, "nooooo"},
        {0x00D9, 0x00DD, "uuuuy"},
        {0x00E0, 0x00E5, "aaaaaa"},
        {0x00E7, 0x00EF, "ceeeeiiii"},
        {0x00F1, 0x00F6, "nooooo"},
        {0x00F9, 0x00FD, "uuuuy"},
        {0x00FF, 0x00FF, "y"},
        // Latin Extended-A (Đ đ Ħ ħ ı Ĳ ĳ ĸ Ŀ ŀ Ł ł ŉ Ŋ ŋ Œ œ Ŧ ŧ ſ handled above).
        {0x0100, 0x0105, "aaaaaa"},
        {0x0106, 0x010D, "cccccccc"},
        {0x010E, 0x010F, "dd"},
        {0x0112, 0x011B, "eeeeeeeeee"},
        {0x011C, 0x0123, "gggggggg"},
        {0x0124, 0x0125, "hh"},
        {0x0128, 0x0130, "iiiiiiiii"},
        {0x0134, 0x0135, "jj"},
        {0x0136, 0x0137, "kk"},
        {0x0139, 0x013E, "llllll"},
        {0x0143, 0x0148, "nnnnnn"},
        {0x014C, 0x0151, "oooooo"},
        {0x0154, 0x0159, "rrrrrr"},
        {0x015A, 0x0161, "ssssssss"},
        {0x0162, 0x0165, "tttt"},
        {0x0168, 0x0173, "uuuuuuuuuuuu"},
        {0x0174, 0x0175, "ww"},
        {0x0176, 0x0178, "yyy"},
        {0x0179, 0x017E, "zzzzzz"},
        // Latin Extended-B, the caron/ogonek/dot rows in common use.
        {0x01CD, 0x01DC, "aaiioouuuuuuuuuu"},
        {0x01DE, 0x01E1, "aaaa"},
        {0x01E6, 0x01ED, "ggkkoooo"},
        {0x01F0, 0x01F0, "j"},
        {0x01F4, 0x01F5, "gg"},
        {0x01F8, 0x01FB, "nnaa"},
        {0x0200, 0x0217, "aaaaeeeeiiiioooorrrruuuu"},
        {0x0218, 0x021B, "sstt"},
        {0x021E, 0x021F, "hh"},
        {0x0226, 0x0233, "aaeeooooooooyy"},
        // Latin Extended Additional (Western European + Vietnamese).
        {0x1E00, 0x1E01, "aa"},
        {0x1E02, 0x1E07, "bbbbbb"},
        {0x1E08, 0x1E09, "cc"},
        {0x1E0A, 0x1E13, "dddddddddd"},
        {0x1E14, 0x1E1D, "eeeeeeeeee"},
        {0x1E1E, 0x1E1F, "ff"},
        {0x1E20, 0x1E21, "gg"},
        {0x1E22, 0x1E2B, "hhhhhhhhhh"},
        {0x1E2C, 0x1E2F, "iiii"},
        {0x1E30, 0x1E35, "kkkkkk"},
        {0x1E36, 0x1E3D, "llllllll"},
        {0x1E3E, 0x1E43, "mmmmmm"},
        {0x1E44, 0x1E4B, "nnnnnnnn"},
        {0x1E4C, 0x1E53, "oooooooo"},
        {0x1E54, 0x1E57, "pppp"},
        {0x1E58, 0x1E5F, "rrrrrrrr"},
        {0x1E60, 0x1E69, "ssssssssss"},
        {0x1E6A, 0x1E71, "tttttttt"},
        {0x1E72, 0x1E7B, "uuuuuuuuuu"},
        {0x1E7C, 0x1E7F, "vvvv"},
        {0x1E80, 0x1E89, "wwwwwwwwww"},
        {0x1E8A, 0x1E8D, "xxxx"},
        {0x1E8E, 0x1E8F, "yy"},
        {0x1E90, 0x1E9B, "zzzzzzhtwyas"},
        {0x1EA0, 0x1EB7, "aaaaaaaaaaaaaaaaaaaaaaaa"},
        {0x1EB8, 0x1EC7, "eeeeeeeeeeeeeeee"},
        {0x1EC8, 0x1ECB, "iiii"},
        {0x1ECC, 0x1EE3, "oooooooooooooooooooooooo"},
        {0x1EE4, 0x1EF1, "uuuuuuuuuuuuuu"},
        {0x1EF2, 0x1EF9, "yyyyyyyy"},
        // Superscript and subscript digits and letters.
        {0x2074, 0x2079, "456789"},
        {0x2080, 0x2089, "0123456789"},
        {0x2090, 0x2093, "aeox"},
        {0x2095, 0x209C, "hklmnpst"},
    };
    count = sizeof(table) / sizeof(table[0]);
    return table;
}

inline bool is_unicode_space(char32_t cp) {
    return cp == 0x00A0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
           cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

inline bool is_combining_mark(char32_t cp) {
    return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
           (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
           (cp >= 0xFE20 && cp <= 0xFE2F);
}

// Appends the ASCII replacement for cp, or nothing when cp has no mapping.
inline void append_folded(char32_t cp, std::string& out) {
    if (cp >= 0xFF01 && cp <= 0xFF5E) cp -= 0xFEE0;  // fullwidth forms
    if (cp < 0x80) {
        char c = static_cast<char>(cp);
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
        return;
    }
    if (is_unicode_space(cp)) {
        out.push_back(' ');
        return;
    }
    if (is_combining_mark(cp)) return;

    std::size_t n = 0;
    const FoldEntry* specials = special_fold_table(n);
    const FoldEntry* end = specials + n;
    const FoldEntry* it = std::lower_bound(
        specials, end, cp, [](const FoldEntry& e, char32_t v) { return e.cp < v; });
    if (it != end && it->cp == cp) {
        out.append(it->out);
        return;
    }

    const FoldRange* ranges = range_fold_table(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (cp >= ranges[k].first && cp <= ranges[k].last) {
            char c = ranges[k].bases[cp - ranges[k].first];
            if (static_cast<unsigned char>(c) < 0x80) out.push_back(c);
            return;
        }
    }
    // No mapping: dropped.
}

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

}  // namespace detail

/// Converts text to lowercase US-ASCII: compatibility decompositions and the
/// fixed transliteration table replace what they can, combining marks and
/// unmapped non-ASCII characters are dropped, whitespace runs collapse to a
/// single space, and leading/trailing whitespace goes away. Idempotent.
inline std::string fold_ascii(std::string_view text) {
    std::string mapped;
    mapped.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) detail::append_folded(detail::decode_utf8(text, i), mapped);

    std::string out;
    out.reserve(mapped.size());
    bool pending_space = false;
    for (char c : mapped) {
        if (detail::is_ascii_space(c)) {
            pending_space = true;
            continue;
        }
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x20 || u == 0x7F) continue;  // stray control bytes
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

struct SplitAuthor {
    std::optional<std::string> last_name;
    std::optional<char> first_initial;
};

namespace detail {

inline std::string trim_spaces(std::string_view s) {
    std::size_t b = s.find_first_not_of(' ');
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(' ');
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Splits an author into (folded last name, first initial). Pre-split names
/// are used as given; otherwise full_name is split on the first comma, or --
/// lacking a comma -- the final whitespace token becomes the last name. The
/// final-token rule is lossy for particles ("van Dam" -> "dam"); the scorer's
/// Levenshtein tolerance absorbs most of the resulting mismatch.
inline SplitAuthor split_author(const AuthorName& name) {
    std::string last, first;
    if (name.last_name && !fold_ascii(*name.last_name).empty()) {
        last = fold_ascii(*name.last_name);
        if (name.first_name) first = fold_ascii(*name.first_name);
    } else if (name.full_name) {
        std::string folded = fold_ascii(*name.full_name);
        std::size_t comma = folded.find(',');
        if (comma != std::string::npos) {
            last = detail::trim_spaces(std::string_view(folded).substr(0, comma));
            first = detail::trim_spaces(std::string_view(folded).substr(comma + 1));
        } else {
            std::size_t sp = folded.rfind(' ');
            if (sp == std::string::npos) {
                last = folded;
            } else {
                last = folded.substr(sp + 1);
                first = detail::trim_spaces(std::string_view(folded).substr(0, sp));
            }
        }
    }

    SplitAuthor result;
    if (!last.empty()) result.last_name = std::move(last);
    if (!first.empty()) result.first_initial = first[0];
    return result;
}

namespace detail {

inline std::optional<std::string> normalize_doi(const std::optional<std::string>& raw) {
    if (!raw) return std::nullopt;
    std::string s;
    s.reserve(raw->size());
    for (char c : *raw) {
        if (is_ascii_space(c)) continue;
        s.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    static constexpr std::string_view prefixes[] = {
        "https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
        "http://dx.doi.org/", "doi:",
    };
    for (std::string_view p : prefixes) {
        if (s.size() > p.size() && std::string_view(s).substr(0, p.size()) == p) {
            s.erase(0, p.size());
            break;
        }
    }
    if (s.empty()) return std::nullopt;
    return s;
}

// ISSN/ISBN: keep alphanumerics (check digits may be X), uppercase.
inline std::optional<std::string> normalize_identifier(std::string_view raw) {
    std::string s;
    for (char c : raw) {
        if ((c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z'))
            s.push_back(c);
        else if (c >= 'a' && c <= 'z')
            s.push_back(static_cast<char>(c - 'a' + 'A'));
    }
    if (s.empty()) return std::nullopt;
    return s;
}

inline void push_unique(std::vector<std::string>& list, std::string value) {
    if (std::find(list.begin(), list.end(), value) == list.end())
        list.push_back(std::move(value));
}

}  // namespace detail

/// Preprocesses one record for matching. Total: never fails on a
/// syntactically valid DocumentRecord; unusable attributes just come out
/// absent.
inline NormalizedRecord normalize_record(const DocumentRecord& rec,
                                         const NormalizeOptions& opts = {}) {
    NormalizedRecord n;
    n.record_id = rec.record_id;
    n.doi_norm = detail::normalize_doi(rec.doi);

    if (!rec.authors.empty()) {
        SplitAuthor first = split_author(rec.authors.front());
        n.first_author_last = std::move(first.last_name);
        n.first_author_initial = first.first_initial;
    }

    if (rec.title) {
        std::string t = fold_ascii(*rec.title);
        if (!t.empty()) n.title_norm = std::move(t);
    }
    for (const auto& variant : rec.source.title_variants) {
        std::string v = fold_ascii(variant);
        if (!v.empty()) detail::push_unique(n.source_title_variants_norm, std::move(v));
    }
    for (const auto& issn : rec.source.issns)
        if (auto id = detail::normalize_identifier(issn))
            detail::push_unique(n.issns_norm, std::move(*id));
    for (const auto& isbn : rec.source.isbns)
        if (auto id = detail::normalize_identifier(isbn))
            detail::push_unique(n.isbns_norm, std::move(*id));

    n.year_num = normalize_numeric(rec.publication_year, opts);
    n.volume_num = normalize_numeric(rec.volume, opts);
    n.issue_num = normalize_numeric(rec.issue, opts);
    n.begin_page_num = normalize_numeric(rec.begin_page, opts);
    n.end_page_num = normalize_numeric(rec.end_page, opts);
    n.article_number_num = normalize_numeric(rec.article_number, opts);
    return n;
}

inline std::vector<NormalizedRecord> normalize_corpus(const Corpus& corpus,
                                                      const NormalizeOptions& opts = {}) {
    std::vector<NormalizedRecord> out;
    out.reserve(corpus.size());
    for (const auto& rec : corpus.records()) out.push_back(normalize_record(rec, opts));
    return out;
}

}  // namespace biblink
