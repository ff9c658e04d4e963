#include <doctest.h>

#include <cmath>
#include <random>

#include "simplex/errors.hpp"
#include "simplex/format.hpp"
#include "simplex/io.hpp"
#include "test_util.hpp"

using namespace simplex;

TEST_SUITE("io") {

TEST_CASE("model snapshots round-trip within 1e-12") {
    std::mt19937 gen(99);
    const int32_t k = 3;
    const int32_t v = 7;
    std::vector<double> theta;
    std::vector<double> phi;
    std::vector<std::string> ids{"alpha", "beta", "gamma", "delta"};
    for (size_t m = 0; m < ids.size(); ++m) {
        const auto row = test::random_simplex(gen, k);
        theta.insert(theta.end(), row.begin(), row.end());
    }
    for (int32_t t = 0; t < k; ++t) {
        const auto row = test::random_simplex(gen, v);
        phi.insert(phi.end(), row.begin(), row.end());
    }
    auto estimate = test::make_estimate(ids, theta, k, phi);
    estimate.vocab_fingerprint = 0xdeadbeef12345678ULL;
    estimate.hyper.seed = 271828;
    estimate.firm_meta.at("alpha").size = 17.25;
    estimate.firm_meta.at("alpha").tag = "tag-a";

    const std::string text = format_model(estimate);
    const ModelEstimate loaded = parse_model(text);

    CHECK(loaded.firm_ids == estimate.firm_ids);
    CHECK(loaded.vocab_tokens == estimate.vocab_tokens);
    CHECK(loaded.vocab_fingerprint == estimate.vocab_fingerprint);
    CHECK(loaded.hyper.seed == estimate.hyper.seed);
    CHECK(loaded.hyper.k == k);
    REQUIRE(loaded.theta_mean.size() == estimate.theta_mean.size());
    REQUIRE(loaded.phi_mean.size() == estimate.phi_mean.size());
    for (size_t i = 0; i < theta.size(); ++i)
        CHECK(std::abs(loaded.theta_mean[i] - estimate.theta_mean[i]) < 1e-12);
    for (size_t i = 0; i < phi.size(); ++i)
        CHECK(std::abs(loaded.phi_mean[i] - estimate.phi_mean[i]) < 1e-12);
    for (size_t i = 0; i < estimate.incidence.size(); ++i)
        CHECK(std::abs(loaded.incidence[i] - estimate.incidence[i]) < 1e-12);
    CHECK(loaded.firm_meta.at("alpha").size == doctest::Approx(17.25).epsilon(1e-12));
    CHECK(loaded.firm_meta.at("alpha").tag == "tag-a");

    // A second write is byte-identical.
    CHECK(format_model(loaded) == text);
}

TEST_CASE("model loading rejects version mismatches") {
    CHECK_THROWS_WITH_AS(parse_model("SIMPLEX-MODEL v2\n"),
                         doctest::Contains("version mismatch"), DataError);
    CHECK_THROWS_WITH_AS(parse_model("garbage\n"), doctest::Contains("version"),
                         DataError);
}

TEST_CASE("model loading names the truncated row") {
    const auto estimate = test::make_estimate(
        {"a", "b"}, {0.5, 0.5, 0.25, 0.75}, 2, {0.5, 0.5, 0.5, 0.5});
    std::string text = format_model(estimate);
    // Drop the last theta row line.
    const size_t theta_pos = text.find("theta 2 2\n");
    REQUIRE(theta_pos != std::string::npos);
    const size_t row0_end = text.find('\n', theta_pos + 10);
    const size_t row1_end = text.find('\n', row0_end + 1);
    text.erase(row0_end + 1, row1_end - row0_end);
    CHECK_THROWS_WITH_AS(parse_model(text), doctest::Contains("row 1"), DataError);
}

TEST_CASE("model loading rejects a row with fewer entries than declared") {
    const auto estimate = test::make_estimate({"a"}, {0.5, 0.5}, 2, {1.0, 1.0});
    std::string text = format_model(estimate);
    const size_t pos = text.find("2 0:");
    REQUIRE(pos != std::string::npos);
    // Claim two entries but provide one.
    const size_t line_end = text.find('\n', pos);
    const std::string row = text.substr(pos, line_end - pos);
    const size_t second = row.find(" 1:");
    text.replace(pos, line_end - pos, row.substr(0, second));
    CHECK_THROWS_WITH_AS(parse_model(text), doctest::Contains("truncated"), DataError);
}

TEST_CASE("corpus snapshots round-trip exactly") {
    Corpus corpus = test::three_firm_corpus();
    corpus.firm_meta.at("nile").size = 2.5;
    corpus.firm_meta.at("nile").tag = "mega";
    const std::string text = format_corpus(corpus);
    const Corpus loaded = parse_corpus(text);
    CHECK(loaded.docs.size() == corpus.docs.size());
    CHECK(loaded.vocab.tokens() == corpus.vocab.tokens());
    CHECK(loaded.vocab.fingerprint() == corpus.vocab.fingerprint());
    for (size_t i = 0; i < corpus.docs.size(); ++i) {
        CHECK(loaded.docs[i].firm_id == corpus.docs[i].firm_id);
        CHECK(loaded.docs[i].counts == corpus.docs[i].counts);
        CHECK(loaded.docs[i].total_tokens == corpus.docs[i].total_tokens);
    }
    CHECK(loaded.firm_meta.at("nile").size == 2.5);
    CHECK(loaded.firm_meta.at("nile").tag == "mega");
    CHECK(format_corpus(loaded) == text);
}

TEST_CASE("corpus snapshots keep empty docs flagged") {
    const Corpus corpus = build_corpus(std::vector<std::pair<std::string, TokenStream>>{
        {"a", {"x"}}, {"hollow", {}}});
    const Corpus loaded = parse_corpus(format_corpus(corpus));
    CHECK(loaded.docs.size() == 2);
    CHECK(loaded.docs[1].empty());
    REQUIRE(loaded.warnings.size() == 1);
    CHECK(loaded.warnings[0].find("hollow") != std::string::npos);
}

TEST_CASE("corpus parser rejects malformed documents") {
    const Corpus corpus = test::three_firm_corpus();
    std::string text = format_corpus(corpus);
    CHECK_THROWS_AS(parse_corpus(text.substr(0, text.size() / 2)), DataError);
    // Word id out of range.
    std::string bad = text;
    const size_t pos = bad.rfind("0:2");
    bad.replace(pos, 3, "9:2");
    CHECK_THROWS_WITH_AS(parse_corpus(bad), doctest::Contains("out of range"), DataError);
}

TEST_CASE("config defaults, parsing, and rejection") {
    const RunConfig defaults = parse_config("");
    CHECK(defaults.k == 10);
    CHECK(defaults.doc_prior == 0.1);
    CHECK(defaults.topic_prior == 0.01);
    CHECK(defaults.samples == 2000);
    CHECK(defaults.burn_in == 500);
    CHECK(defaults.tau == 0.05);
    CHECK(defaults.neighbor_threshold == 0.25);
    CHECK(defaults.max_neighbors == 20);

    const RunConfig parsed = parse_config("tau = 0.07\nK = 4\nseed = 9\n# comment\n");
    CHECK(parsed.tau == 0.07);
    CHECK(parsed.k == 4);
    CHECK(parsed.seed == 9);

    CHECK_THROWS_WITH_AS(parse_config("K = 0\n"), doctest::Contains("k must be"),
                         DataError);
    CHECK_THROWS_WITH_AS(parse_config("mystery = 1\n"), doctest::Contains("unknown key"),
                         DataError);
    CHECK_THROWS_WITH_AS(parse_config("tau\n"), doctest::Contains("key = value"),
                         DataError);
    CHECK_THROWS_AS(parse_config("burn_in = 2000\n"), DataError);  // >= samples
}

TEST_CASE("config round-trips through format_config") {
    RunConfig config;
    config.corpus_input = "firms.tsv";
    config.rules_file = "rules.txt";
    config.k = 7;
    config.seed = 123456789;
    config.tau = 0.125;
    const RunConfig loaded = parse_config(format_config(config));
    CHECK(loaded.corpus_input == config.corpus_input);
    CHECK(loaded.rules_file == config.rules_file);
    CHECK(loaded.k == config.k);
    CHECK(loaded.seed == config.seed);
    CHECK(loaded.tau == config.tau);
    CHECK(format_config(loaded) == format_config(config));
}

TEST_CASE("file save/load round-trip on disk") {
    const test::TempDir dir;
    const Corpus corpus = test::three_firm_corpus();
    save_corpus(corpus, dir.file("c.txt").string());
    CHECK(load_corpus(dir.file("c.txt").string()).vocab.fingerprint() ==
          corpus.vocab.fingerprint());
    CHECK_THROWS_WITH_AS(load_corpus(dir.file("absent.txt").string()),
                         doctest::Contains("cannot open"), DataError);
}

TEST_CASE("read_firm_records handles both field layouts") {
    const test::TempDir dir;
    const std::string path = dir.write(
        "firms.tsv",
        "nile\t100\tNile sells books and cloud.\n"
        "tallmart\tTallmart is retail.\n"
        "\n");
    const auto records = read_firm_records(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].firm_id == "nile");
    CHECK(records[0].size == 100.0);
    CHECK(records[1].firm_id == "tallmart");
    CHECK_FALSE(records[1].size.has_value());
    CHECK(records[1].text == "Tallmart is retail.");

    const std::string bad = dir.write("bad.tsv", "x\tnotanumber\ttext\n");
    CHECK_THROWS_WITH_AS(read_firm_records(bad), doctest::Contains("size"), DataError);
}

TEST_CASE("format_double gives 12 significant digits, locale-independent") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
    const double value = 0.123456789012345;
    const double back = parse_double(format_double(value));
    CHECK(std::abs(back - value) < 1e-12);
    CHECK_THROWS_AS(parse_double("1.2.3"), DataError);
    CHECK_THROWS_AS(parse_int("12x"), DataError);
}

}  // TEST_SUITE
