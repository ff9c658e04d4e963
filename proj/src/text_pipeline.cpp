#include "simplex/text_pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "simplex/errors.hpp"

namespace simplex {
namespace {

bool is_unicode_space(uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Common punctuation blocks outside ASCII: Latin-1 punctuation/symbols,
// General Punctuation, CJK symbols and punctuation.
bool is_nonascii_punct(uint32_t cp) {
    return (cp >= 0xA1 && cp <= 0xBF) || (cp >= 0x2010 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x303F);
}

// Reads one codepoint starting at i, advancing i. Malformed bytes are
// returned as-is so broken encodings cannot crash the pipeline.
uint32_t next_codepoint(std::string_view s, size_t& i, size_t& byte_len) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    size_t len = 1;
    uint32_t cp = b0;
    if (b0 >= 0xF0) len = 4;
    else if (b0 >= 0xE0) len = 3;
    else if (b0 >= 0xC0) len = 2;
    if (len > 1) {
        if (i + len > s.size()) len = 1;
        else {
            cp = b0 & (0x7F >> len);
            for (size_t j = 1; j < len; ++j) {
                const auto b = static_cast<unsigned char>(s[i + j]);
                if ((b & 0xC0) != 0x80) { len = 1; cp = b0; break; }
                cp = (cp << 6) | (b & 0x3F);
            }
        }
    }
    byte_len = len;
    i += len;
    return cp;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string f;
    while (in >> f) fields.push_back(f);
    return fields;
}

bool has_upper_ascii(const std::string& tok) {
    return std::any_of(tok.begin(), tok.end(),
                       [](unsigned char c) { return std::isupper(c); });
}

[[noreturn]] void fail(const std::string& origin, int line_no, const std::string& msg) {
    throw DataError(origin + ":" + std::to_string(line_no) + ": " + msg);
}

}  // namespace

TokenStream normalize(std::string_view text) {
    TokenStream out;
    std::string current;
    size_t i = 0;
    while (i < text.size()) {
        const size_t start = i;
        size_t byte_len = 0;
        const uint32_t cp = next_codepoint(text, i, byte_len);
        if (is_unicode_space(cp)) {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else if (cp < 0x80) {
            const auto c = static_cast<unsigned char>(cp);
            if (std::isalnum(c)) current.push_back(static_cast<char>(std::tolower(c)));
            // ASCII punctuation is deleted, never split on.
        } else if (!is_nonascii_punct(cp)) {
            current.append(text.substr(start, byte_len));
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

RuleSet parse_rules(const std::string& text, const std::string& origin) {
    RuleSet rules;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool depth_set = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.empty() || fields[0][0] == '#') continue;

        for (size_t f = 1; f < fields.size(); ++f) {
            if (fields[f] != "->" && has_upper_ascii(fields[f]))
                fail(origin, line_no, "rule tokens must be lowercase: '" + fields[f] + "'");
        }

        const std::string& kind = fields[0];
        if (kind == "stop") {
            if (fields.size() != 2) fail(origin, line_no, "expected: stop <token>");
            rules.stopwords.insert(fields[1]);
        } else if (kind == "stem" || kind == "lemma") {
            if (fields.size() != 4 || fields[2] != "->")
                fail(origin, line_no, "expected: " + kind + " <token> -> <token>");
            auto& edges = (kind == "stem") ? rules.stems : rules.lemmas;
            auto [it, inserted] = edges.emplace(fields[1], fields[3]);
            if (!inserted && it->second != fields[3])
                fail(origin, line_no, "conflicting " + kind + " rule for '" + fields[1] +
                                          "' ('" + it->second + "' vs '" + fields[3] + "')");
        } else if (kind == "ngram") {
            const auto arrow = std::find(fields.begin(), fields.end(), "->");
            if (arrow == fields.end() || arrow + 2 != fields.end())
                fail(origin, line_no, "expected: ngram <tok> <tok> [...] -> <compound>");
            NgramRule rule;
            rule.source.assign(fields.begin() + 1, arrow);
            rule.compound = fields.back();
            if (rule.source.size() < 2)
                fail(origin, line_no, "n-gram source must have at least two tokens");
            for (const auto& existing : rules.ngrams) {
                if (existing.source == rule.source && existing.compound != rule.compound)
                    fail(origin, line_no, "conflicting ngram rule for source sequence");
            }
            rules.ngrams.push_back(std::move(rule));
        } else if (kind == "set") {
            if (fields.size() != 3 || fields[1] != "max_lemma_depth")
                fail(origin, line_no, "expected: set max_lemma_depth <int>");
            int depth = 0;
            try {
                depth = std::stoi(fields[2]);
            } catch (const std::exception&) {
                fail(origin, line_no, "max_lemma_depth is not an integer: '" + fields[2] + "'");
            }
            if (depth < 1) fail(origin, line_no, "max_lemma_depth must be positive");
            if (depth_set) fail(origin, line_no, "max_lemma_depth set twice");
            rules.max_lemma_depth = depth;
            depth_set = true;
        } else {
            fail(origin, line_no, "unknown directive '" + kind + "'");
        }
    }

    // Longest source first; stable so equal lengths keep file order.
    std::stable_sort(rules.ngrams.begin(), rules.ngrams.end(),
                     [](const NgramRule& a, const NgramRule& b) {
                         return a.source.size() > b.source.size();
                     });
    rules.validate();
    return rules;
}

RuleSet load_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open rules file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rules(buf.str(), path);
}

void RuleSet::validate() const {
    if (max_lemma_depth < 1) throw DataError("max_lemma_depth must be positive");
    for (const auto& [src, dst] : stems) {
        if (stopwords.count(dst))
            throw DataError("token '" + dst + "' is both a stopword and a stem target");
        (void)src;
    }
    for (const auto& [src, dst] : lemmas) {
        if (stopwords.count(dst))
            throw DataError("token '" + dst + "' is both a stopword and a lemma target");
        (void)src;
    }
    // Both substitution maps resolve across homogenization passes, so any
    // cycle would oscillate forever; reject them outright.
    const auto check_acyclic = [](const std::map<std::string, std::string>& edges,
                                  const char* kind) {
        for (const auto& [start, first] : edges) {
            std::set<std::string> seen{start};
            std::string cur = first;
            while (true) {
                if (!seen.insert(cur).second)
                    throw DataError(std::string(kind) + " cycle detected through '" + cur +
                                    "'");
                const auto it = edges.find(cur);
                if (it == edges.end()) break;
                cur = it->second;
            }
        }
    };
    check_acyclic(lemmas, "lemma");
    check_acyclic(stems, "stem");
}

namespace {

TokenStream apply_rules_pass(const TokenStream& stream, const RuleSet& rules) {
    // 1. N-gram construction: greedy, longest-first, non-overlapping.
    TokenStream merged;
    merged.reserve(stream.size());
    size_t i = 0;
    while (i < stream.size()) {
        const NgramRule* hit = nullptr;
        for (const auto& rule : rules.ngrams) {
            const size_t n = rule.source.size();
            if (i + n > stream.size()) continue;
            if (std::equal(rule.source.begin(), rule.source.end(), stream.begin() + i)) {
                hit = &rule;
                break;
            }
        }
        if (hit) {
            merged.push_back(hit->compound);
            i += hit->source.size();
        } else {
            merged.push_back(stream[i]);
            ++i;
        }
    }

    // 2. Stemming, one application per token. 3. Lemma chains up to the depth
    // cap. 4. Stopword removal last, so rules still see function words.
    TokenStream out;
    out.reserve(merged.size());
    for (std::string token : merged) {
        if (const auto stem = rules.stems.find(token); stem != rules.stems.end())
            token = stem->second;
        for (int depth = 0; depth < rules.max_lemma_depth; ++depth) {
            const auto edge = rules.lemmas.find(token);
            if (edge == rules.lemmas.end()) break;
            token = edge->second;
        }
        if (!rules.stopwords.count(token)) out.push_back(std::move(token));
    }
    return out;
}

}  // namespace

TokenStream apply_rules(const TokenStream& stream, const RuleSet& rules) {
    // Homogenization runs the staged pass until the stream stops changing:
    // removals and merges can create new rule sites (a dropped stopword can
    // join an n-gram, a stemmed token can start a lemma chain), and the output
    // must be a fixpoint. Validated rule sets converge in a handful of passes;
    // the cap only guards degenerate inputs.
    TokenStream current = apply_rules_pass(stream, rules);
    for (int pass = 1; pass < 64; ++pass) {
        TokenStream next = apply_rules_pass(current, rules);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

}  // namespace simplex
