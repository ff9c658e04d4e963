#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simplex/corpus.hpp"
#include "simplex/sampler.hpp"

namespace simplex {

// Flat key=value run configuration. Unknown keys are rejected; missing keys
// take the documented defaults below.
struct RunConfig {
    std::string corpus_input;   // raw firm records (TSV)
    std::string rules_file;
    std::string output_dir = ".";

    int32_t k = 10;
    double doc_prior = 0.1;
    double topic_prior = 0.01;
    int32_t samples = 2000;
    int32_t burn_in = 500;
    uint64_t seed = 42;
    int32_t chains = 1;

    double neighbor_threshold = 0.25;
    int32_t max_neighbors = 20;
    double tau = 0.05;
    int32_t top_n = 3;
    double edge_threshold = 0.05;

    void validate() const;  // throws DataError on range violations
    Hyperparams hyperparams(int32_t vocab_size) const;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

// SIMPLEX-MODEL v1: versioned text snapshot of a posterior-mean estimate.
std::string format_model(const ModelEstimate& estimate);
ModelEstimate parse_model(const std::string& text, const std::string& origin = "<string>");
void save_model(const ModelEstimate& estimate, const std::string& path);
ModelEstimate load_model(const std::string& path);

// SIMPLEX-CORPUS v1: versioned text snapshot of a corpus build.
std::string format_corpus(const Corpus& corpus);
Corpus parse_corpus(const std::string& text, const std::string& origin = "<string>");
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

// Raw ingestion records: one firm per line, firm_id<TAB>size<TAB>raw_text,
// with the size field optional (firm_id<TAB>raw_text).
struct RawRecord {
    std::string firm_id;
    std::optional<double> size;
    std::string text;
};
std::vector<RawRecord> read_firm_records(const std::string& path);

}  // namespace simplex
