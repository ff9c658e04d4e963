#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "simplex/corpus.hpp"
#include "simplex/sampler.hpp"

namespace simplex::test {

// Self-deleting scratch directory for file-based tests.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("simplex_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

    std::string write(const std::string& name, const std::string& content) const {
        const auto p = file(name);
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }

private:
    std::filesystem::path path_;
};

// The worked three-firm corpus used throughout.
inline Corpus three_firm_corpus() {
    return build_corpus(std::vector<std::pair<std::string, TokenStream>>{
        {"nile", {"retail", "cloud", "movie", "movie", "retail", "cloud"}},
        {"tallmart", {"retail", "retail", "store"}},
        {"cloudfilms", {"movie", "cinema", "web-app", "cloud"}},
    });
}

// Builds an estimate directly from dense matrices; vocab tokens default to
// w0..w{V-1} and firm sizes to 1.
inline ModelEstimate make_estimate(std::vector<std::string> firm_ids,
                                   std::vector<double> theta, int32_t k,
                                   std::vector<double> phi,
                                   std::vector<std::string> vocab_tokens = {},
                                   uint64_t fingerprint = 0) {
    ModelEstimate est;
    const auto v = static_cast<int32_t>(phi.size() / static_cast<size_t>(k));
    if (vocab_tokens.empty()) {
        for (int32_t w = 0; w < v; ++w) vocab_tokens.push_back("w" + std::to_string(w));
    }
    est.firm_ids = std::move(firm_ids);
    est.theta_mean = std::move(theta);
    est.phi_mean = std::move(phi);
    est.vocab_tokens = std::move(vocab_tokens);
    est.vocab_fingerprint = fingerprint;
    est.hyper = Hyperparams::symmetric(k, v, 0.1, 0.01, 2, 1, 1);
    for (const auto& id : est.firm_ids)
        est.firm_meta.emplace(id, FirmMeta{.size = 1.0, .display_name = id, .tag = ""});
    est.incidence.assign(static_cast<size_t>(k), 0.0);
    const auto m_total = static_cast<int32_t>(est.firm_ids.size());
    for (int32_t m = 0; m < m_total; ++m)
        for (int32_t topic = 0; topic < k; ++topic)
            est.incidence[topic] += est.theta_mean[static_cast<size_t>(m) * k + topic];
    for (double& x : est.incidence) x /= m_total;
    return est;
}

// Random simplex point for property tests (test-local randomness; never the
// library Rng, so oracle draws stay independent of the code under test).
inline std::vector<double> random_simplex(std::mt19937& gen, size_t k) {
    std::exponential_distribution<double> exp_dist(1.0);
    std::vector<double> out(k);
    double total = 0.0;
    for (auto& x : out) {
        x = exp_dist(gen);
        total += x;
    }
    for (auto& x : out) x /= total;
    return out;
}

}  // namespace simplex::test
