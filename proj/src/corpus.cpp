#include "simplex/corpus.hpp"

#include <algorithm>
#include <set>

#include "simplex/errors.hpp"

namespace simplex {

int32_t Vocabulary::add(const std::string& token) {
    const auto it = token_to_id_.find(token);
    if (it != token_to_id_.end()) return it->second;
    const auto id = static_cast<int32_t>(id_to_token_.size());
    token_to_id_.emplace(token, id);
    id_to_token_.push_back(token);
    return id;
}

std::optional<int32_t> Vocabulary::find(const std::string& token) const {
    const auto it = token_to_id_.find(token);
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
}

uint64_t Vocabulary::fingerprint() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (const auto& tok : id_to_token_) {
        for (const char c : tok) mix(static_cast<unsigned char>(c));
        mix(0x1F);  // unit separator keeps ["ab","c"] != ["a","bc"]
    }
    return h;
}

int64_t BowDocument::count_of(int32_t word_id) const {
    const auto it = std::lower_bound(
        counts.begin(), counts.end(), word_id,
        [](const auto& entry, int32_t id) { return entry.first < id; });
    if (it == counts.end() || it->first != word_id) return 0;
    return it->second;
}

std::vector<int32_t> Corpus::fit_eligible() const {
    std::vector<int32_t> out;
    for (size_t i = 0; i < docs.size(); ++i) {
        if (!docs[i].empty()) out.push_back(static_cast<int32_t>(i));
    }
    return out;
}

const BowDocument* Corpus::find_doc(const std::string& firm_id) const {
    for (const auto& doc : docs) {
        if (doc.firm_id == firm_id) return &doc;
    }
    return nullptr;
}

int64_t Corpus::total_tokens() const {
    int64_t total = 0;
    for (const auto& doc : docs) total += doc.total_tokens;
    return total;
}

Corpus build_corpus(const std::vector<StreamInput>& streams) {
    if (streams.empty()) throw DataError("build_corpus: empty corpus");

    Corpus corpus;
    std::set<std::string> seen_ids;
    for (const auto& input : streams) {
        if (input.firm_id.empty()) throw DataError("build_corpus: empty firm id");
        if (input.firm_id.find_first_of("\t\n\r") != std::string::npos)
            throw DataError("build_corpus: firm id contains control characters: '" +
                            input.firm_id + "'");
        if (!seen_ids.insert(input.firm_id).second)
            throw DataError("build_corpus: duplicate firm id '" + input.firm_id + "'");
        if (input.size && *input.size < 0.0)
            throw DataError("build_corpus: negative size for firm '" + input.firm_id + "'");

        BowDocument doc;
        doc.firm_id = input.firm_id;
        std::map<int32_t, int64_t> counts;  // ordered: counts emitted by word id
        for (const auto& token : input.tokens) ++counts[corpus.vocab.add(token)];
        doc.counts.assign(counts.begin(), counts.end());
        for (const auto& [id, n] : doc.counts) doc.total_tokens += n;

        if (doc.empty())
            corpus.warnings.push_back("empty document excluded from fitting: " + doc.firm_id);

        FirmMeta meta;
        if (input.size) {
            meta.size = *input.size;
        } else {
            corpus.warnings.push_back("no size for firm '" + doc.firm_id +
                                      "'; defaulting to 1");
        }
        meta.display_name = input.display_name.empty() ? doc.firm_id : input.display_name;
        meta.tag = input.tag;
        corpus.firm_meta.emplace(doc.firm_id, std::move(meta));
        corpus.docs.push_back(std::move(doc));
    }
    return corpus;
}

Corpus build_corpus(const std::vector<std::pair<std::string, TokenStream>>& streams) {
    std::vector<StreamInput> inputs;
    inputs.reserve(streams.size());
    for (const auto& [id, tokens] : streams) {
        StreamInput input;
        input.firm_id = id;
        input.tokens = tokens;
        input.size = 1.0;  // explicit: no warning for the convenience overload
        inputs.push_back(std::move(input));
    }
    return build_corpus(inputs);
}

TokenStream concat_documents(const std::vector<TokenStream>& parts) {
    TokenStream out;
    size_t total = 0;
    for (const auto& part : parts) total += part.size();
    out.reserve(total);
    for (const auto& part : parts) out.insert(out.end(), part.begin(), part.end());
    return out;
}

}  // namespace simplex
