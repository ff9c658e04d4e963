#include "simplex/evaluation.hpp"

#include <cmath>

#include "simplex/errors.hpp"

namespace simplex {
namespace {

double clamped_log(double p, int64_t* clamp_count) {
    if (p < kProbFloor) {
        if (clamp_count) ++*clamp_count;
        p = kProbFloor;
    }
    return std::log(p);
}

}  // namespace

double dirichlet_log_pdf(std::span<const double> x, std::span<const double> alpha) {
    if (x.size() != alpha.size() || x.empty())
        throw DataError("dirichlet_log_pdf: dimension mismatch");
    double alpha_total = 0.0;
    double log_beta = 0.0;
    double log_kernel = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(alpha[i] > 0.0)) throw DataError("dirichlet_log_pdf: nonpositive alpha");
        alpha_total += alpha[i];
        log_beta += std::lgamma(alpha[i]);
        log_kernel += (alpha[i] - 1.0) * clamped_log(x[i], nullptr);
    }
    return std::lgamma(alpha_total) - log_beta + log_kernel;
}

double doc_log_likelihood(const BowDocument& doc, std::span<const double> theta_row,
                          std::span<const double> phi, int32_t k, int32_t vocab_size,
                          int64_t* clamp_count) {
    if (doc.empty()) throw DataError("doc_log_likelihood: empty document");
    if (theta_row.size() != static_cast<size_t>(k) ||
        phi.size() != static_cast<size_t>(k) * vocab_size)
        throw DataError("doc_log_likelihood: dimension mismatch");

    double total = 0.0;
    for (const auto& [word, count] : doc.counts) {
        if (word < 0 || word >= vocab_size)
            throw DataError("doc_log_likelihood: word id out of range");
        double mix = 0.0;
        for (int32_t topic = 0; topic < k; ++topic)
            mix += phi[static_cast<size_t>(topic) * vocab_size + word] * theta_row[topic];
        total += static_cast<double>(count) * clamped_log(mix, clamp_count);
    }
    return total;
}

double corpus_perplexity(const Corpus& corpus, std::span<const double> theta,
                         std::span<const double> phi, int32_t k) {
    const auto eligible = corpus.fit_eligible();
    if (eligible.empty()) throw DataError("corpus_perplexity: no fit-eligible documents");
    const int32_t v = corpus.vocab.size();
    double log_total = 0.0;
    int64_t tokens = 0;
    for (size_t m = 0; m < eligible.size(); ++m) {
        const auto& doc = corpus.docs[eligible[m]];
        const std::span<const double> theta_row{theta.data() + m * static_cast<size_t>(k),
                                                static_cast<size_t>(k)};
        log_total += doc_log_likelihood(doc, theta_row, phi, k, v, nullptr);
        tokens += doc.total_tokens;
    }
    return std::exp(-log_total / static_cast<double>(tokens));
}

EvalReport perplexity(const Corpus& corpus, const ModelEstimate& estimate) {
    if (corpus.vocab.fingerprint() != estimate.vocab_fingerprint)
        throw DataError("perplexity: vocabulary fingerprint mismatch "
                        "(model was fit on a different corpus build)");
    const auto eligible = corpus.fit_eligible();
    if (static_cast<int32_t>(eligible.size()) != estimate.num_docs())
        throw DataError("perplexity: document count mismatch");

    EvalReport report;
    const int32_t k = estimate.k();
    const int32_t v = estimate.vocab_size();
    double log_total = 0.0;
    for (size_t m = 0; m < eligible.size(); ++m) {
        const auto& doc = corpus.docs[eligible[m]];
        if (doc.firm_id != estimate.firm_ids[m])
            throw DataError("perplexity: document order mismatch at '" + doc.firm_id + "'");
        const double ll = doc_log_likelihood(doc, estimate.theta_row(static_cast<int32_t>(m)),
                                             estimate.phi_mean, k, v, &report.clamped_terms);
        report.per_doc_log_likelihood.push_back(ll);
        log_total += ll;
        report.token_total += doc.total_tokens;
    }
    if (report.token_total <= 0) throw DataError("perplexity: corpus has no tokens");
    report.perplexity = std::exp(-log_total / static_cast<double>(report.token_total));
    return report;
}

double joint_log_likelihood(const Corpus& corpus, const SamplerState& state,
                            const Hyperparams& hyper, int64_t* clamp_count) {
    const auto eligible = corpus.fit_eligible();
    if (static_cast<int32_t>(eligible.size()) != state.num_docs ||
        state.k != hyper.k || state.vocab_size != corpus.vocab.size())
        throw DataError("joint_log_likelihood: state does not match corpus/hyperparams");

    const int32_t k = state.k;
    const int32_t v = state.vocab_size;
    double total = 0.0;
    for (int32_t topic = 0; topic < k; ++topic) {
        const std::span<const double> row{state.phi.data() + static_cast<size_t>(topic) * v,
                                          static_cast<size_t>(v)};
        total += dirichlet_log_pdf(row, hyper.topic_prior);
    }
    for (int32_t m = 0; m < state.num_docs; ++m) {
        const std::span<const double> theta_row{state.theta.data() + static_cast<size_t>(m) * k,
                                                static_cast<size_t>(k)};
        total += dirichlet_log_pdf(theta_row, hyper.doc_prior);
        const auto& doc = corpus.docs[eligible[m]];
        size_t n = 0;
        for (const auto& [word, count] : doc.counts) {
            for (int64_t i = 0; i < count; ++i, ++n) {
                const int32_t topic = state.z[m][n];
                total += clamped_log(theta_row[topic], clamp_count);
                total += clamped_log(state.phi[static_cast<size_t>(topic) * v + word],
                                     clamp_count);
            }
        }
    }
    return total;
}

}  // namespace simplex
