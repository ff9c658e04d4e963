#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace simplex {

// Processed tokens in document order. Order only matters until the stream is
// folded into a bag of words.
using TokenStream = std::vector<std::string>;

struct NgramRule {
    std::vector<std::string> source;  // at least two tokens
    std::string compound;             // single whitespace-free token
};

// Homogenization rules compiled from a rules file. Application order is
// fixed: n-grams, then stems, then lemma chains, then stopword removal.
// Immutable after load; safe to share across threads.
struct RuleSet {
    static constexpr int kDefaultMaxLemmaDepth = 8;

    std::set<std::string> stopwords;
    std::map<std::string, std::string> stems;
    std::vector<NgramRule> ngrams;  // sorted longest source first
    std::map<std::string, std::string> lemmas;
    int max_lemma_depth = kDefaultMaxLemmaDepth;

    // Checks the structural invariants: no lemma cycle reachable within
    // max_lemma_depth hops, no stopword that is also a stem/lemma target.
    // Throws DataError on violation.
    void validate() const;
};

// Parses the line-oriented rules DSL:
//   # comment
//   stop <token>
//   stem <token> -> <token>
//   ngram <tok> <tok> [...] -> <compound>
//   lemma <token> -> <token>
//   set max_lemma_depth <int>
// Syntax errors report <origin>:<line>. The returned set is validated.
RuleSet parse_rules(const std::string& text, const std::string& origin = "<string>");
RuleSet load_rules(const std::string& path);

// Splits on Unicode whitespace, lowercases ASCII letters, deletes punctuation
// (including intra-word punctuation; "U.S.-based" becomes "usbased"), drops
// empty residues. Hyphens only ever enter a stream through rule-produced
// compound tokens.
TokenStream normalize(std::string_view text);

// Applies n-gram construction (greedy longest-first, left to right,
// non-overlapping), single-pass stemming, transitive lemmatization capped at
// max_lemma_depth, then stopword removal. Expects a normalized stream.
TokenStream apply_rules(const TokenStream& stream, const RuleSet& rules);

}  // namespace simplex
