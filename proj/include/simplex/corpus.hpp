#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "simplex/text_pipeline.hpp"

namespace simplex {

// Bidirectional token <-> dense word-id map. Ids are assigned in first
// appearance order, which keeps rebuilds of the same input bit-stable.
class Vocabulary {
public:
    int32_t add(const std::string& token);
    std::optional<int32_t> find(const std::string& token) const;
    const std::string& token(int32_t id) const { return id_to_token_[id]; }
    int32_t size() const { return static_cast<int32_t>(id_to_token_.size()); }
    const std::vector<std::string>& tokens() const { return id_to_token_; }

    // Order-sensitive 64-bit FNV-1a over id_to_token; guards models against
    // being evaluated on a different corpus build.
    uint64_t fingerprint() const;

private:
    std::unordered_map<std::string, int32_t> token_to_id_;
    std::vector<std::string> id_to_token_;
};

// One firm's bag of words: sparse counts over word ids, kept sorted by id.
struct BowDocument {
    std::string firm_id;
    std::vector<std::pair<int32_t, int64_t>> counts;  // (word id, count >= 1)
    int64_t total_tokens = 0;                         // N_m

    int64_t count_of(int32_t word_id) const;
    bool empty() const { return total_tokens == 0; }
};

struct FirmMeta {
    double size = 1.0;          // s_i; drives portfolio weights
    std::string display_name;
    std::string tag;            // pass-through label, e.g. an external sector
};

struct Corpus {
    std::vector<BowDocument> docs;
    Vocabulary vocab;
    std::map<std::string, FirmMeta> firm_meta;
    std::vector<std::string> warnings;  // empty-doc flags, defaulted sizes

    // Indices of docs with at least one token; only these participate in
    // fitting and perplexity.
    std::vector<int32_t> fit_eligible() const;
    const BowDocument* find_doc(const std::string& firm_id) const;
    int64_t total_tokens() const;
};

struct StreamInput {
    std::string firm_id;
    TokenStream tokens;
    std::optional<double> size;      // absent -> 1 with a recorded warning
    std::string display_name;        // empty -> firm_id
    std::string tag;
};

// Folds token streams into bag-of-words documents over a shared vocabulary.
// Rejects duplicate firm ids and fully empty input; empty documents are
// retained but flagged and excluded from fitting.
Corpus build_corpus(const std::vector<StreamInput>& streams);
Corpus build_corpus(const std::vector<std::pair<std::string, TokenStream>>& streams);

// Concatenates several sources for one firm; a part's influence downstream is
// proportional to its token count.
TokenStream concat_documents(const std::vector<TokenStream>& parts);

}  // namespace simplex
