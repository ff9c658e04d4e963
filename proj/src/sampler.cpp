#include "simplex/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "simplex/errors.hpp"
#include "simplex/evaluation.hpp"

namespace simplex {
namespace {

void check_dims(const Corpus& corpus, const Hyperparams& hyper) {
    hyper.validate();
    if (corpus.vocab.size() < 1) throw DataError("fit: empty vocabulary");
    if (corpus.fit_eligible().empty())
        throw DataError("fit: no fit-eligible documents (all empty)");
    if (static_cast<int32_t>(hyper.topic_prior.size()) != corpus.vocab.size())
        throw DataError("fit: topic_prior length does not match vocabulary size");
}

// Tokens of one doc in a fixed expansion order (ascending word id, repeated
// by count); z vectors are aligned with this order.
std::vector<int32_t> expand_tokens(const BowDocument& doc) {
    std::vector<int32_t> tokens;
    tokens.reserve(static_cast<size_t>(doc.total_tokens));
    for (const auto& [word, count] : doc.counts) {
        for (int64_t i = 0; i < count; ++i) tokens.push_back(word);
    }
    return tokens;
}

// Topic labels are exchangeable, so a chain can wander between permutation
// modes; averaging raw draws would smear the estimate toward uniform. Each
// retained sample is aligned to the first retained sample's word-mixtures by
// greedy best-similarity matching before it enters the running mean.
std::vector<int32_t> match_topics(std::span<const double> phi,
                                  std::span<const double> reference_phi, int32_t k,
                                  int32_t v) {
    std::vector<double> sim(static_cast<size_t>(k) * k);
    for (int32_t a = 0; a < k; ++a) {
        for (int32_t b = 0; b < k; ++b) {
            double sq_norm = 0.0;
            for (int32_t w = 0; w < v; ++w) {
                const double d = std::sqrt(phi[static_cast<size_t>(a) * v + w]) -
                                 std::sqrt(reference_phi[static_cast<size_t>(b) * v + w]);
                sq_norm += d * d;
            }
            sim[static_cast<size_t>(a) * k + b] = -sq_norm;
        }
    }
    std::vector<int32_t> perm(static_cast<size_t>(k), -1);
    std::vector<bool> used_a(static_cast<size_t>(k), false);
    std::vector<bool> used_b(static_cast<size_t>(k), false);
    for (int32_t round = 0; round < k; ++round) {
        double best = -std::numeric_limits<double>::infinity();
        int32_t best_a = -1;
        int32_t best_b = -1;
        for (int32_t a = 0; a < k; ++a) {
            if (used_a[a]) continue;
            for (int32_t b = 0; b < k; ++b) {
                if (used_b[b]) continue;
                if (sim[static_cast<size_t>(a) * k + b] > best) {
                    best = sim[static_cast<size_t>(a) * k + b];
                    best_a = a;
                    best_b = b;
                }
            }
        }
        perm[best_a] = best_b;
        used_a[best_a] = true;
        used_b[best_b] = true;
    }
    return perm;
}

// Full conditional for one token. Falls back to a uniform assignment if every
// product underflowed to zero, which can only happen right after
// initialization with very small priors.
int32_t draw_assignment(const SamplerState& state, int32_t m, int32_t word,
                        std::vector<double>& weights, Rng& rng,
                        int64_t& zero_fallbacks) {
    const int32_t k = state.k;
    const double* theta_row = state.theta.data() + static_cast<size_t>(m) * k;
    double total = 0.0;
    for (int32_t topic = 0; topic < k; ++topic) {
        const double w =
            theta_row[topic] *
            state.phi[static_cast<size_t>(topic) * state.vocab_size + word];
        weights[topic] = w;
        total += w;
    }
    if (total <= 0.0) {
        ++zero_fallbacks;
        std::fill(weights.begin(), weights.end(), 1.0);
    }
    return sample_categorical(weights, rng);
}

}  // namespace

Hyperparams Hyperparams::symmetric(int32_t k, int32_t vocab_size, double doc_prior,
                                   double topic_prior, int32_t samples, int32_t burn_in,
                                   uint64_t seed) {
    Hyperparams h;
    h.k = k;
    h.doc_prior.assign(static_cast<size_t>(std::max(k, 0)), doc_prior);
    h.topic_prior.assign(static_cast<size_t>(std::max(vocab_size, 0)), topic_prior);
    h.samples = samples;
    h.burn_in = burn_in;
    h.seed = seed;
    return h;
}

void Hyperparams::validate() const {
    if (k < 1) throw DataError("hyperparams: k must be >= 1");
    if (samples < 1) throw DataError("hyperparams: samples must be >= 1");
    if (burn_in < 0 || burn_in >= samples)
        throw DataError("hyperparams: burn_in must satisfy 0 <= burn_in < samples");
    if (static_cast<int32_t>(doc_prior.size()) != k)
        throw DataError("hyperparams: doc_prior length must equal k");
    for (double a : doc_prior)
        if (!(a > 0.0)) throw DataError("hyperparams: doc_prior entries must be positive");
    if (topic_prior.empty())
        throw DataError("hyperparams: topic_prior must be non-empty");
    for (double a : topic_prior)
        if (!(a > 0.0)) throw DataError("hyperparams: topic_prior entries must be positive");
}

std::optional<int32_t> ModelEstimate::row_of(const std::string& firm_id) const {
    for (size_t i = 0; i < firm_ids.size(); ++i) {
        if (firm_ids[i] == firm_id) return static_cast<int32_t>(i);
    }
    return std::nullopt;
}

SamplerState init_state(const Corpus& corpus, const Hyperparams& hyper) {
    check_dims(corpus, hyper);
    const auto eligible = corpus.fit_eligible();
    const auto m_total = static_cast<int32_t>(eligible.size());
    const int32_t k = hyper.k;
    const int32_t v = corpus.vocab.size();

    SamplerState state{.z = {},
                       .doc_topic_counts = std::vector<int64_t>(static_cast<size_t>(m_total) * k, 0),
                       .topic_word_counts = std::vector<int64_t>(static_cast<size_t>(k) * v, 0),
                       .theta = {},
                       .phi = {},
                       .rng = Rng(hyper.seed),
                       .num_docs = m_total,
                       .k = k,
                       .vocab_size = v};
    state.theta.reserve(static_cast<size_t>(m_total) * k);
    state.phi.reserve(static_cast<size_t>(k) * v);
    state.z.resize(m_total);

    for (int32_t m = 0; m < m_total; ++m) {
        const auto row = sample_dirichlet(hyper.doc_prior, state.rng);
        state.theta.insert(state.theta.end(), row.begin(), row.end());
    }
    for (int32_t topic = 0; topic < k; ++topic) {
        const auto row = sample_dirichlet(hyper.topic_prior, state.rng);
        state.phi.insert(state.phi.end(), row.begin(), row.end());
    }

    std::vector<double> weights(static_cast<size_t>(k));
    for (int32_t m = 0; m < m_total; ++m) {
        const auto tokens = expand_tokens(corpus.docs[eligible[m]]);
        auto& doc_z = state.z[m];
        doc_z.reserve(tokens.size());
        for (const int32_t word : tokens) {
            const int32_t topic = draw_assignment(state, m, word, weights, state.rng,
                                                  state.zero_weight_fallbacks);
            doc_z.push_back(topic);
            ++state.doc_topic_counts[static_cast<size_t>(m) * k + topic];
            ++state.topic_word_counts[static_cast<size_t>(topic) * v + word];
        }
    }
    return state;
}

void gibbs_step(SamplerState& state, const Corpus& corpus, const Hyperparams& hyper) {
    const auto eligible = corpus.fit_eligible();
    if (static_cast<int32_t>(eligible.size()) != state.num_docs ||
        state.k != hyper.k || state.vocab_size != corpus.vocab.size())
        throw DataError("gibbs_step: state does not match corpus/hyperparams");

    const int32_t k = state.k;
    const int32_t v = state.vocab_size;

    // Assignment sweep under the current theta/phi draws (blocked update:
    // the mixtures are held fixed while every token is reassigned).
    std::vector<double> weights(static_cast<size_t>(k));
    for (int32_t m = 0; m < state.num_docs; ++m) {
        const auto tokens = expand_tokens(corpus.docs[eligible[m]]);
        auto& doc_z = state.z[m];
        for (size_t n = 0; n < tokens.size(); ++n) {
            const int32_t word = tokens[n];
            const int32_t old_topic = doc_z[n];
            const int32_t new_topic = draw_assignment(state, m, word, weights, state.rng,
                                                      state.zero_weight_fallbacks);
            if (new_topic != old_topic) {
                --state.doc_topic_counts[static_cast<size_t>(m) * k + old_topic];
                ++state.doc_topic_counts[static_cast<size_t>(m) * k + new_topic];
                --state.topic_word_counts[static_cast<size_t>(old_topic) * v + word];
                ++state.topic_word_counts[static_cast<size_t>(new_topic) * v + word];
                doc_z[n] = new_topic;
            }
        }
    }

    // Redraw each word-mixture from its count-updated Dirichlet.
    std::vector<double> posterior(static_cast<size_t>(v));
    for (int32_t topic = 0; topic < k; ++topic) {
        for (int32_t word = 0; word < v; ++word) {
            posterior[word] = hyper.topic_prior[word] +
                              static_cast<double>(
                                  state.topic_word_counts[static_cast<size_t>(topic) * v + word]);
        }
        const auto row = sample_dirichlet(posterior, state.rng);
        std::copy(row.begin(), row.end(),
                  state.phi.begin() + static_cast<size_t>(topic) * v);
    }

    // Redraw each industry-mixture.
    std::vector<double> doc_posterior(static_cast<size_t>(k));
    for (int32_t m = 0; m < state.num_docs; ++m) {
        for (int32_t topic = 0; topic < k; ++topic) {
            doc_posterior[topic] = hyper.doc_prior[topic] +
                                   static_cast<double>(
                                       state.doc_topic_counts[static_cast<size_t>(m) * k + topic]);
        }
        const auto row = sample_dirichlet(doc_posterior, state.rng);
        std::copy(row.begin(), row.end(),
                  state.theta.begin() + static_cast<size_t>(m) * k);
    }
}

std::pair<ModelEstimate, FitTrace> fit(const Corpus& corpus, const Hyperparams& hyper) {
    SamplerState state = init_state(corpus, hyper);
    const auto eligible = corpus.fit_eligible();
    const int32_t k = state.k;
    const int32_t v = state.vocab_size;

    std::vector<double> theta_acc(state.theta.size(), 0.0);
    std::vector<double> phi_acc(state.phi.size(), 0.0);
    std::vector<double> reference_phi;
    FitTrace trace;
    trace.perplexity.reserve(static_cast<size_t>(hyper.samples));

    int64_t retained = 0;
    for (int32_t s = 1; s <= hyper.samples; ++s) {
        gibbs_step(state, corpus, hyper);
        trace.perplexity.push_back(corpus_perplexity(corpus, state.theta, state.phi, k));
        if (s > hyper.burn_in) {
            if (reference_phi.empty()) reference_phi = state.phi;
            const auto perm = match_topics(state.phi, reference_phi, k, v);
            for (int32_t topic = 0; topic < k; ++topic) {
                const size_t from = static_cast<size_t>(topic) * v;
                const size_t to = static_cast<size_t>(perm[topic]) * v;
                for (int32_t w = 0; w < v; ++w) phi_acc[to + w] += state.phi[from + w];
            }
            for (int32_t m = 0; m < state.num_docs; ++m) {
                const size_t row = static_cast<size_t>(m) * k;
                for (int32_t topic = 0; topic < k; ++topic)
                    theta_acc[row + perm[topic]] += state.theta[row + topic];
            }
            ++retained;
        }
    }

    const auto row_mean = [retained](std::vector<double>& acc, int32_t rows, int32_t cols) {
        for (int32_t r = 0; r < rows; ++r) {
            double* row = acc.data() + static_cast<size_t>(r) * cols;
            double total = 0.0;
            for (int32_t c = 0; c < cols; ++c) {
                row[c] /= static_cast<double>(retained);
                total += row[c];
            }
            for (int32_t c = 0; c < cols; ++c) row[c] /= total;
        }
    };
    row_mean(theta_acc, state.num_docs, k);
    row_mean(phi_acc, k, v);

    ModelEstimate estimate;
    estimate.hyper = hyper;
    estimate.vocab_fingerprint = corpus.vocab.fingerprint();
    estimate.vocab_tokens = corpus.vocab.tokens();
    estimate.theta_mean = std::move(theta_acc);
    estimate.phi_mean = std::move(phi_acc);
    estimate.firm_ids.reserve(eligible.size());
    for (const int32_t idx : eligible) {
        const auto& id = corpus.docs[idx].firm_id;
        estimate.firm_ids.push_back(id);
        if (const auto it = corpus.firm_meta.find(id); it != corpus.firm_meta.end())
            estimate.firm_meta.emplace(id, it->second);
    }
    estimate.incidence.assign(static_cast<size_t>(k), 0.0);
    for (int32_t m = 0; m < state.num_docs; ++m) {
        for (int32_t topic = 0; topic < k; ++topic)
            estimate.incidence[topic] += estimate.theta_mean[static_cast<size_t>(m) * k + topic];
    }
    for (double& x : estimate.incidence) x /= static_cast<double>(state.num_docs);

    return {std::move(estimate), std::move(trace)};
}

std::vector<std::pair<ModelEstimate, FitTrace>> fit_chains(const Corpus& corpus,
                                                           const Hyperparams& hyper,
                                                           int32_t chains) {
    if (chains < 1) throw DataError("fit_chains: chains must be >= 1");
    std::vector<std::future<std::pair<ModelEstimate, FitTrace>>> futures;
    futures.reserve(static_cast<size_t>(chains));
    for (int32_t c = 0; c < chains; ++c) {
        Hyperparams chain_hyper = hyper;
        chain_hyper.seed = hyper.seed + static_cast<uint64_t>(c);
        futures.push_back(std::async(std::launch::async,
                                     [&corpus, chain_hyper] { return fit(corpus, chain_hyper); }));
    }
    std::vector<std::pair<ModelEstimate, FitTrace>> out;
    out.reserve(futures.size());
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

Corpus generate_corpus(std::span<const double> theta, int32_t num_docs,
                       std::span<const double> phi, int32_t k, int32_t vocab_size,
                       std::span<const int64_t> doc_lengths, Rng& rng) {
    if (k < 1 || vocab_size < 1) throw DataError("generate_corpus: k and V must be >= 1");
    if (theta.size() != static_cast<size_t>(num_docs) * k)
        throw DataError("generate_corpus: theta dimensions mismatch");
    if (phi.size() != static_cast<size_t>(k) * vocab_size)
        throw DataError("generate_corpus: phi dimensions mismatch");
    if (doc_lengths.size() != static_cast<size_t>(num_docs))
        throw DataError("generate_corpus: doc_lengths length mismatch");

    Corpus corpus;
    // The full vocabulary is registered up front so word ids match phi
    // columns exactly, even for words that are never drawn.
    for (int32_t word = 0; word < vocab_size; ++word)
        corpus.vocab.add("w" + std::to_string(word));

    for (int32_t m = 0; m < num_docs; ++m) {
        const std::span<const double> theta_row{theta.data() + static_cast<size_t>(m) * k,
                                                static_cast<size_t>(k)};
        std::map<int32_t, int64_t> counts;
        for (int64_t n = 0; n < doc_lengths[m]; ++n) {
            const int32_t topic = sample_categorical(theta_row, rng);
            const std::span<const double> phi_row{
                phi.data() + static_cast<size_t>(topic) * vocab_size,
                static_cast<size_t>(vocab_size)};
            ++counts[sample_categorical(phi_row, rng)];
        }
        BowDocument doc;
        doc.firm_id = "firm" + std::to_string(m);
        doc.counts.assign(counts.begin(), counts.end());
        for (const auto& [id, n] : doc.counts) doc.total_tokens += n;
        if (doc.empty())
            corpus.warnings.push_back("empty document excluded from fitting: " + doc.firm_id);
        corpus.firm_meta.emplace(doc.firm_id, FirmMeta{.size = 1.0,
                                                       .display_name = doc.firm_id,
                                                       .tag = ""});
        corpus.docs.push_back(std::move(doc));
    }
    return corpus;
}

}  // namespace simplex
