#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simplex/errors.hpp"
#include "simplex/evaluation.hpp"
#include "simplex/sampler.hpp"
#include "test_util.hpp"

using namespace simplex;

namespace {

void check_conservation(const SamplerState& state, const Corpus& corpus) {
    const auto eligible = corpus.fit_eligible();
    int64_t grand_total = 0;
    for (int32_t m = 0; m < state.num_docs; ++m) {
        int64_t doc_total = 0;
        for (int32_t k = 0; k < state.k; ++k) doc_total += state.doc_topic(m, k);
        CHECK(doc_total == corpus.docs[eligible[m]].total_tokens);
        grand_total += doc_total;
    }
    int64_t word_total = 0;
    for (const int64_t c : state.topic_word_counts) word_total += c;
    CHECK(word_total == grand_total);
}

void check_simplex_rows(const std::vector<double>& matrix, int32_t rows, int32_t cols) {
    for (int32_t r = 0; r < rows; ++r) {
        double total = 0.0;
        for (int32_t c = 0; c < cols; ++c) {
            const double x = matrix[static_cast<size_t>(r) * cols + c];
            CHECK(x >= 0.0);
            total += x;
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("init_state with one topic assigns everything to it") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(1, corpus.vocab.size(), 0.1, 0.01,
                                                     10, 2, 7);
    const SamplerState state = init_state(corpus, hyper);
    for (const auto& doc_z : state.z)
        for (const int32_t z : doc_z) CHECK(z == 0);
    for (int32_t m = 0; m < state.num_docs; ++m)
        CHECK(state.doc_topic(m, 0) == corpus.docs[corpus.fit_eligible()[m]].total_tokens);
    check_conservation(state, corpus);
}

TEST_CASE("init_state is deterministic under a fixed seed") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(3, corpus.vocab.size(), 0.1, 0.01,
                                                     10, 2, 1234);
    const SamplerState a = init_state(corpus, hyper);
    const SamplerState b = init_state(corpus, hyper);
    CHECK(a.z == b.z);
    CHECK(a.theta == b.theta);
    CHECK(a.phi == b.phi);
    CHECK(a.doc_topic_counts == b.doc_topic_counts);
    CHECK(a.topic_word_counts == b.topic_word_counts);
    CHECK(a.rng == b.rng);
}

TEST_CASE("init_state satisfies both conservation invariants") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(3, corpus.vocab.size(), 0.1, 0.01,
                                                     10, 2, 42);
    const SamplerState state = init_state(corpus, hyper);
    check_conservation(state, corpus);
    check_simplex_rows(state.theta, state.num_docs, state.k);
    check_simplex_rows(state.phi, state.k, state.vocab_size);
}

TEST_CASE("gibbs_step with one topic leaves z fixed and redraws phi exactly") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(1, corpus.vocab.size(), 0.1, 0.01,
                                                     10, 2, 55);
    SamplerState state = init_state(corpus, hyper);
    const auto z_before = state.z;
    Rng replay = state.rng;

    gibbs_step(state, corpus, hyper);

    CHECK(state.z == z_before);
    for (int32_t m = 0; m < state.num_docs; ++m) CHECK(state.theta[m] == 1.0);
    check_conservation(state, corpus);

    // Replay the step's draw sequence: one uniform per token for the
    // (degenerate) assignment, then the phi row, then one theta row per doc.
    for (int64_t t = 0; t < corpus.total_tokens(); ++t) replay.uniform01();
    std::vector<double> posterior(hyper.topic_prior);
    for (int32_t w = 0; w < state.vocab_size; ++w)
        posterior[w] += static_cast<double>(state.topic_word(0, w));
    const auto expected_phi = sample_dirichlet(posterior, replay);
    for (int32_t w = 0; w < state.vocab_size; ++w) CHECK(state.phi[w] == expected_phi[w]);
}

TEST_CASE("assignment conditional matches the two-term normalization") {
    // One doc, one token of word 1; the conditional for topic 0 is
    // theta0*phi0w / (theta0*phi0w + theta1*phi1w) = 0.03/0.38.
    const Corpus corpus = build_corpus(
        std::vector<std::pair<std::string, TokenStream>>{{"d", {"v", "w"}}});
    // vocab: v=0, w=1; use a two-token doc but pin the probe to token index 1.
    const Hyperparams hyper = Hyperparams::symmetric(2, 2, 0.1, 0.01, 10, 2, 0);

    const double theta[] = {0.3, 0.7};
    const double phi[] = {0.9, 0.1, 0.5, 0.5};
    const double expect0 =
        theta[0] * phi[0 * 2 + 1] / (theta[0] * phi[0 * 2 + 1] + theta[1] * phi[1 * 2 + 1]);

    int zeros = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        SamplerState state = init_state(corpus, hyper);
        std::copy(theta, theta + 2, state.theta.begin());
        std::copy(phi, phi + 4, state.phi.begin());
        state.rng = Rng(9000 + static_cast<uint64_t>(t));
        gibbs_step(state, corpus, hyper);
        if (state.z[0][1] == 0) ++zeros;
    }
    const double freq = zeros / static_cast<double>(trials);
    CHECK(std::abs(freq - expect0) < 0.02);
}

TEST_CASE("token conservation holds across steps") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(3, corpus.vocab.size(), 0.1, 0.01,
                                                     10, 2, 77);
    SamplerState state = init_state(corpus, hyper);
    const int64_t total = corpus.total_tokens();
    for (int step = 0; step < 25; ++step) {
        gibbs_step(state, corpus, hyper);
        const int64_t word_total = std::accumulate(state.topic_word_counts.begin(),
                                                   state.topic_word_counts.end(),
                                                   static_cast<int64_t>(0));
        CHECK(word_total == total);
        check_conservation(state, corpus);
    }
}

TEST_CASE("fit is bit-deterministic for equal seeds") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(3, corpus.vocab.size(), 0.1, 0.01,
                                                     60, 20, 2024);
    const auto [est_a, trace_a] = fit(corpus, hyper);
    const auto [est_b, trace_b] = fit(corpus, hyper);
    CHECK(est_a.theta_mean == est_b.theta_mean);
    CHECK(est_a.phi_mean == est_b.phi_mean);
    CHECK(est_a.incidence == est_b.incidence);
    CHECK(trace_a.perplexity == trace_b.perplexity);
}

TEST_CASE("fit rejects burn_in >= samples and empty corpora") {
    const Corpus corpus = test::three_firm_corpus();
    CHECK_THROWS_AS(fit(corpus, Hyperparams::symmetric(3, corpus.vocab.size(), 0.1, 0.01,
                                                       10, 10, 1)),
                    DataError);
    const Corpus empty = build_corpus(
        std::vector<std::pair<std::string, TokenStream>>{{"a", {}}});
    CHECK_THROWS_AS(fit(empty, Hyperparams::symmetric(2, 1, 0.1, 0.01, 10, 2, 1)),
                    DataError);
}

TEST_CASE("fit estimate rows are simplices and incidence sums to 1") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(3, corpus.vocab.size(), 0.1, 0.01,
                                                     50, 10, 5);
    const auto [estimate, trace] = fit(corpus, hyper);
    check_simplex_rows(estimate.theta_mean, estimate.num_docs(), estimate.k());
    check_simplex_rows(estimate.phi_mean, estimate.k(), estimate.vocab_size());
    const double inc_total = std::accumulate(estimate.incidence.begin(),
                                             estimate.incidence.end(), 0.0);
    CHECK(std::abs(inc_total - 1.0) < 1e-9);
    CHECK(trace.perplexity.size() == 50);
}

TEST_CASE("fit skips empty documents but keeps them in the corpus") {
    Corpus corpus = build_corpus(std::vector<std::pair<std::string, TokenStream>>{
        {"a", {"x", "y"}}, {"empty", {}}, {"b", {"y", "z"}}});
    const Hyperparams hyper = Hyperparams::symmetric(2, corpus.vocab.size(), 0.1, 0.01,
                                                     20, 5, 3);
    const auto [estimate, trace] = fit(corpus, hyper);
    CHECK(estimate.num_docs() == 2);
    CHECK(estimate.firm_ids == std::vector<std::string>{"a", "b"});
}

TEST_CASE("fit_chains runs independent deterministic chains") {
    const Corpus corpus = test::three_firm_corpus();
    const Hyperparams hyper = Hyperparams::symmetric(2, corpus.vocab.size(), 0.1, 0.01,
                                                     30, 10, 100);
    const auto results = fit_chains(corpus, hyper, 3);
    REQUIRE(results.size() == 3);
    for (int32_t c = 0; c < 3; ++c) {
        Hyperparams solo = hyper;
        solo.seed = hyper.seed + static_cast<uint64_t>(c);
        const auto [estimate, trace] = fit(corpus, solo);
        CHECK(results[c].first.theta_mean == estimate.theta_mean);
        CHECK(results[c].first.phi_mean == estimate.phi_mean);
    }
}

TEST_CASE("generate_corpus with one-hot mixtures is degenerate") {
    // Topic m one-hot on word m; doc m one-hot on topic m.
    const int32_t k = 3;
    const int32_t v = 3;
    std::vector<double> theta(9, 0.0);
    std::vector<double> phi(9, 0.0);
    for (int32_t i = 0; i < 3; ++i) {
        theta[static_cast<size_t>(i) * k + i] = 1.0;
        phi[static_cast<size_t>(i) * v + i] = 1.0;
    }
    const std::vector<int64_t> lengths{5, 7, 9};
    Rng rng(31);
    const Corpus corpus = generate_corpus(theta, 3, phi, k, v, lengths, rng);
    REQUIRE(corpus.docs.size() == 3);
    for (int32_t m = 0; m < 3; ++m) {
        CHECK(corpus.docs[m].counts.size() == 1);
        CHECK(corpus.docs[m].counts[0].first == m);
        CHECK(corpus.docs[m].total_tokens == lengths[m]);
    }
}

TEST_CASE("generate_corpus with zero lengths yields empty flagged docs") {
    const std::vector<double> theta{1.0};
    const std::vector<double> phi{1.0};
    const std::vector<int64_t> lengths{0, 0};
    std::vector<double> theta2{1.0, 1.0};
    Rng rng(32);
    const Corpus corpus = generate_corpus(theta2, 2, phi, 1, 1, lengths, rng);
    CHECK(corpus.docs.size() == 2);
    CHECK(corpus.fit_eligible().empty());
    CHECK(corpus.warnings.size() == 2);
}

TEST_CASE("generated word-support proportions converge to theta") {
    // K=2 with disjoint supports: words 0-4 belong to topic 0, 5-9 to topic 1.
    const int32_t v = 10;
    std::vector<double> phi(2 * v, 0.0);
    for (int32_t w = 0; w < 5; ++w) phi[w] = 0.2;
    for (int32_t w = 5; w < v; ++w) phi[v + w] = 0.2;
    const std::vector<double> theta{0.3, 0.7};
    const std::vector<int64_t> lengths{10000};
    Rng rng(33);
    const Corpus corpus = generate_corpus(theta, 1, phi, 2, v, lengths, rng);
    int64_t low = 0;
    for (const auto& [word, count] : corpus.docs[0].counts)
        if (word < 5) low += count;
    CHECK(std::abs(low / 10000.0 - 0.3) < 0.02);
}

TEST_CASE("property: fitted models beat untrained draws on synthetic data") {
    // Small generate-then-fit loop; the posterior mean must outperform an
    // untrained prior draw in at least 9 of 10 seeds.
    int wins = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const int32_t k = 2;
        const int32_t v = 10;
        Rng gen_rng(1000 + seed);
        std::vector<double> true_theta;
        std::vector<double> true_phi;
        const std::vector<double> theta_alpha{0.3, 0.3};
        std::vector<double> phi_alpha(static_cast<size_t>(v), 0.2);
        const int32_t m_total = 20;
        for (int32_t m = 0; m < m_total; ++m) {
            const auto row = sample_dirichlet(theta_alpha, gen_rng);
            true_theta.insert(true_theta.end(), row.begin(), row.end());
        }
        for (int32_t t = 0; t < k; ++t) {
            const auto row = sample_dirichlet(phi_alpha, gen_rng);
            true_phi.insert(true_phi.end(), row.begin(), row.end());
        }
        const std::vector<int64_t> lengths(static_cast<size_t>(m_total), 40);
        const Corpus corpus = generate_corpus(true_theta, m_total, true_phi, k, v,
                                              lengths, gen_rng);

        const Hyperparams hyper = Hyperparams::symmetric(k, v, 0.1, 0.01, 250, 100, seed);
        const auto [estimate, trace] = fit(corpus, hyper);
        const double fitted = perplexity(corpus, estimate).perplexity;

        // Untrained baseline: prior draws with the same shapes.
        Rng base_rng(5000 + seed);
        std::vector<double> base_theta;
        std::vector<double> base_phi;
        for (int32_t m = 0; m < m_total; ++m) {
            const auto row = sample_dirichlet(hyper.doc_prior, base_rng);
            base_theta.insert(base_theta.end(), row.begin(), row.end());
        }
        for (int32_t t = 0; t < k; ++t) {
            const auto row = sample_dirichlet(hyper.topic_prior, base_rng);
            base_phi.insert(base_phi.end(), row.begin(), row.end());
        }
        const double untrained = corpus_perplexity(corpus, base_theta, base_phi, k);
        if (fitted < 0.95 * untrained) ++wins;
    }
    CHECK(wins >= 9);
}

}  // TEST_SUITE
