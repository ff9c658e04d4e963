#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simplex/corpus.hpp"
#include "simplex/random.hpp"

namespace simplex {

// Priors are named after the row they smooth: doc_prior is the Dirichlet
// parameter on each firm's industry-mixture (theta row, length k), and
// topic_prior the parameter on each industry's word-mixture (phi row,
// length V).
struct Hyperparams {
    int32_t k = 0;
    std::vector<double> doc_prior;    // length k, strictly positive
    std::vector<double> topic_prior;  // length V, strictly positive
    int32_t samples = 0;              // S
    int32_t burn_in = 0;              // S*, discarded before averaging
    uint64_t seed = 0;

    static Hyperparams symmetric(int32_t k, int32_t vocab_size, double doc_prior,
                                 double topic_prior, int32_t samples, int32_t burn_in,
                                 uint64_t seed);
    void validate() const;  // throws DataError on range violations
};

// One chain's complete state. Rows of theta/phi are simplex points; the count
// matrices stay integer-consistent with z after every step:
//   sum_k doc_topic(m, k) == N_m      for every eligible doc m
//   sum_{k,v} topic_word(k, v) == total token count
struct SamplerState {
    std::vector<std::vector<int32_t>> z;    // per eligible doc, per token
    std::vector<int64_t> doc_topic_counts;  // M x K, row-major
    std::vector<int64_t> topic_word_counts; // K x V, row-major
    std::vector<double> theta;              // M x K, row-major
    std::vector<double> phi;                // K x V, row-major
    Rng rng;
    int32_t num_docs = 0;  // fit-eligible M
    int32_t k = 0;
    int32_t vocab_size = 0;
    int64_t zero_weight_fallbacks = 0;  // tokens assigned uniformly because
                                        // every theta*phi product underflowed

    int64_t doc_topic(int32_t m, int32_t topic) const {
        return doc_topic_counts[static_cast<size_t>(m) * k + topic];
    }
    int64_t topic_word(int32_t topic, int32_t word) const {
        return topic_word_counts[static_cast<size_t>(topic) * vocab_size + word];
    }
};

// Posterior-mean point estimate plus everything needed to use it standalone:
// row labels, vocabulary tokens, and pass-through firm metadata.
struct ModelEstimate {
    std::vector<std::string> firm_ids;   // row labels for theta_mean
    std::vector<double> theta_mean;      // M x K, row-major simplex rows
    std::vector<double> phi_mean;        // K x V, row-major simplex rows
    Hyperparams hyper;
    uint64_t vocab_fingerprint = 0;
    std::vector<std::string> vocab_tokens;
    std::map<std::string, FirmMeta> firm_meta;
    std::vector<double> incidence;       // length K; mean of theta columns

    int32_t num_docs() const { return static_cast<int32_t>(firm_ids.size()); }
    int32_t k() const { return hyper.k; }
    int32_t vocab_size() const { return static_cast<int32_t>(vocab_tokens.size()); }
    std::optional<int32_t> row_of(const std::string& firm_id) const;
    std::span<const double> theta_row(int32_t m) const {
        return {theta_mean.data() + static_cast<size_t>(m) * k(), static_cast<size_t>(k())};
    }
    std::span<const double> phi_row(int32_t topic) const {
        return {phi_mean.data() + static_cast<size_t>(topic) * vocab_size(),
                static_cast<size_t>(vocab_size())};
    }
};

struct FitTrace {
    std::vector<double> perplexity;  // one entry per sample, burn-in included
};

// Draws theta/phi from their priors and assigns every token's topic from the
// full conditional under those initial draws.
SamplerState init_state(const Corpus& corpus, const Hyperparams& hyper);

// One full sweep: resample every z from the conditional proportional to
// theta[m,k] * phi[k,v] under the current draws, then redraw each phi row
// from Dirichlet(topic_prior + word counts) and each theta row from
// Dirichlet(doc_prior + topic counts).
void gibbs_step(SamplerState& state, const Corpus& corpus, const Hyperparams& hyper);

// Runs `samples` sweeps, discards the first `burn_in`, and returns the
// row-renormalized elementwise mean of the retained draws along with the
// per-sample perplexity trace.
std::pair<ModelEstimate, FitTrace> fit(const Corpus& corpus, const Hyperparams& hyper);

// Independent chains with seeds seed, seed+1, ...; run concurrently, reported
// separately, never merged.
std::vector<std::pair<ModelEstimate, FitTrace>> fit_chains(const Corpus& corpus,
                                                           const Hyperparams& hyper,
                                                           int32_t chains);

// Forward-samples a synthetic corpus from known mixtures; vocabulary ids map
// one-to-one onto phi columns. Used by recovery tests.
Corpus generate_corpus(std::span<const double> theta, int32_t num_docs,
                       std::span<const double> phi, int32_t k, int32_t vocab_size,
                       std::span<const int64_t> doc_lengths, Rng& rng);

}  // namespace simplex
