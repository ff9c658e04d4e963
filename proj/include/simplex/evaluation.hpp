#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simplex/corpus.hpp"
#include "simplex/sampler.hpp"

namespace simplex {

// Mixture probabilities are clamped at this floor before any log so that
// degenerate rows yield finite (huge) perplexities instead of crashes; every
// clamp is counted and surfaced.
inline constexpr double kProbFloor = 1e-300;

struct EvalReport {
    double perplexity = 0.0;
    std::vector<double> per_doc_log_likelihood;  // aligned with estimate rows
    std::optional<double> joint_log_likelihood;
    std::optional<int32_t> scored_sample;        // which sample Eq-style joint scored
    int64_t token_total = 0;
    int64_t clamped_terms = 0;
};

// log Dirichlet density at a simplex point; entries of x are clamped at
// kProbFloor before the log.
double dirichlet_log_pdf(std::span<const double> x, std::span<const double> alpha);

// Per-document mixture log-likelihood:
//   sum_v count(v) * log( sum_k phi[k,v] * theta[k] ).
// The doc must be nonempty; clamp events are added to *clamp_count when given.
double doc_log_likelihood(const BowDocument& doc, std::span<const double> theta_row,
                          std::span<const double> phi, int32_t k, int32_t vocab_size,
                          int64_t* clamp_count = nullptr);

// exp(-sum_m doc_ll / sum_m N_m) over the fit-eligible documents. Rejects a
// corpus whose vocabulary fingerprint differs from the estimate's.
EvalReport perplexity(const Corpus& corpus, const ModelEstimate& estimate);

// Same quantity for raw theta/phi draws; used for per-sample fit traces.
double corpus_perplexity(const Corpus& corpus, std::span<const double> theta,
                         std::span<const double> phi, int32_t k);

// Joint log-likelihood of one chain state: Dirichlet prior terms for every
// phi and theta row plus log theta[m, z] + log phi[z, w] per token.
double joint_log_likelihood(const Corpus& corpus, const SamplerState& state,
                            const Hyperparams& hyper, int64_t* clamp_count = nullptr);

}  // namespace simplex
