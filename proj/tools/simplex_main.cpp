// Command-line front end wiring the full pipeline: preprocess raw firm
// descriptions, fit the topic model, and export the downstream artifacts.
// Config-file defaults can be overridden by flags; flags win.

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "simplex/applications.hpp"
#include "simplex/errors.hpp"
#include "simplex/evaluation.hpp"
#include "simplex/format.hpp"
#include "simplex/io.hpp"
#include "simplex/sampler.hpp"
#include "simplex/text_pipeline.hpp"

namespace fs = std::filesystem;
using namespace simplex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Six significant digits for human-facing probabilities/perplexities.
std::string fmt6(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path.string());
    return out;
}

fs::path ensure_out_dir(const std::string& dir) {
    fs::path path(dir.empty() ? "." : dir);
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw DataError("cannot create output directory: " + path.string());
    return path;
}

struct Cli {
    CLI::App app{"probabilistic industry classification from business descriptions",
                 "simplex"};

    std::string config_path;
    std::string input_path;
    std::string rules_path;
    std::string corpus_path;
    std::string model_path;
    std::string firm_id;
    std::string out_dir;
    int32_t k = 0;
    int32_t samples = 0;
    int32_t burn_in = -1;
    uint64_t seed = 0;
    int32_t chains = 0;
    int32_t top_n = 0;
    int32_t theme = 0;
    double threshold = 0.0;
    double tau = 0.0;

    CLI::App* cmd_preprocess = nullptr;
    CLI::App* cmd_fit = nullptr;
    CLI::App* cmd_topics = nullptr;
    CLI::App* cmd_neighbors = nullptr;
    CLI::App* cmd_portfolio = nullptr;
    CLI::App* cmd_network = nullptr;
    CLI::App* cmd_eval = nullptr;

    Cli() {
        app.require_subcommand(1);
        app.add_option("--config", config_path, "run configuration file (key = value)");

        cmd_preprocess = app.add_subcommand(
            "preprocess", "build a corpus snapshot from raw firm descriptions");
        cmd_preprocess->add_option("--input", input_path, "firm records: id<TAB>size<TAB>text");
        cmd_preprocess->add_option("--rules", rules_path, "homogenization rules file");
        cmd_preprocess->add_option("--out", out_dir, "output directory");

        cmd_fit = app.add_subcommand("fit", "fit the model on a corpus snapshot");
        cmd_fit->add_option("--corpus", corpus_path, "corpus snapshot path");
        cmd_fit->add_option("--k", k, "number of industries");
        cmd_fit->add_option("--samples", samples, "total Gibbs samples");
        cmd_fit->add_option("--burn-in", burn_in, "samples discarded before averaging");
        cmd_fit->add_option("--seed", seed, "random seed");
        cmd_fit->add_option("--chains", chains, "independent chains (seed, seed+1, ...)");
        cmd_fit->add_option("--out", out_dir, "output directory");

        cmd_topics = app.add_subcommand("topics", "print top keywords per industry");
        cmd_topics->add_option("--model", model_path, "model snapshot")->required();
        cmd_topics->add_option("--top-n", top_n, "keywords per industry");

        cmd_neighbors = app.add_subcommand("neighbors", "most similar firms by mixture");
        cmd_neighbors->add_option("--model", model_path, "model snapshot")->required();
        cmd_neighbors->add_option("--firm", firm_id, "focal firm id")->required();
        cmd_neighbors->add_option("--threshold", threshold, "similarity threshold");
        cmd_neighbors->add_option("--top-n", top_n, "max neighbors");
        cmd_neighbors->add_option("--out", out_dir, "output directory");

        cmd_portfolio = app.add_subcommand("portfolio", "thematic portfolio weights");
        cmd_portfolio->add_option("--model", model_path, "model snapshot")->required();
        cmd_portfolio->add_option("--theme", theme, "industry index")->required();
        cmd_portfolio->add_option("--tau", tau, "inclusion threshold");
        cmd_portfolio->add_option("--out", out_dir, "output directory");

        cmd_network = app.add_subcommand("network", "industry co-occurrence network");
        cmd_network->add_option("--model", model_path, "model snapshot")->required();
        cmd_network->add_option("--threshold", threshold, "edge score threshold");
        cmd_network->add_option("--out", out_dir, "output directory");

        cmd_eval = app.add_subcommand("eval", "perplexity of a model on a corpus");
        cmd_eval->add_option("--model", model_path, "model snapshot")->required();
        cmd_eval->add_option("--corpus", corpus_path, "corpus snapshot")->required();
    }

    static bool given(const CLI::App* sub, const std::string& name) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    }

    RunConfig merged_config() const {
        RunConfig config;
        if (!config_path.empty()) config = load_config(config_path);
        const auto sub = app.get_subcommands().front();
        if (given(sub, "--k")) config.k = k;
        if (given(sub, "--samples")) config.samples = samples;
        if (given(sub, "--burn-in")) config.burn_in = burn_in;
        if (given(sub, "--seed")) config.seed = seed;
        if (given(sub, "--chains")) config.chains = chains;
        if (given(sub, "--out")) config.output_dir = out_dir;
        if (given(sub, "--input")) config.corpus_input = input_path;
        if (given(sub, "--rules")) config.rules_file = rules_path;
        if (given(sub, "--threshold")) {
            if (sub == cmd_network) config.edge_threshold = threshold;
            else config.neighbor_threshold = threshold;
        }
        if (given(sub, "--top-n")) {
            if (sub == cmd_neighbors) config.max_neighbors = top_n;
            else config.top_n = top_n;
        }
        if (given(sub, "--tau")) config.tau = tau;
        config.validate();
        return config;
    }
};

int run_preprocess(const Cli& cli) {
    const RunConfig config = cli.merged_config();
    if (config.corpus_input.empty()) throw DataError("preprocess: no input file given");
    if (config.rules_file.empty()) throw DataError("preprocess: no rules file given");

    const RuleSet rules = load_rules(config.rules_file);
    const auto records = read_firm_records(config.corpus_input);

    std::vector<StreamInput> streams;
    streams.reserve(records.size());
    for (const auto& record : records) {
        StreamInput input;
        input.firm_id = record.firm_id;
        input.size = record.size;
        input.tokens = apply_rules(normalize(record.text), rules);
        streams.push_back(std::move(input));
    }
    const Corpus corpus = build_corpus(streams);

    const fs::path out = ensure_out_dir(config.output_dir) / "corpus.txt";
    save_corpus(corpus, out.string());

    int64_t empty_docs = 0;
    for (const auto& doc : corpus.docs)
        if (doc.empty()) ++empty_docs;
    for (const auto& warning : corpus.warnings) std::cerr << "warning: " << warning << "\n";
    std::cout << "firms\t" << corpus.docs.size() << "\n";
    std::cout << "vocab\t" << corpus.vocab.size() << "\n";
    std::cout << "tokens\t" << corpus.total_tokens() << "\n";
    std::cout << "empty_docs\t" << empty_docs << "\n";
    std::cout << "wrote\t" << out.string() << "\n";
    return kExitOk;
}

void write_fit_log(const fs::path& path, const FitTrace& trace, const Hyperparams& hyper,
                   const EvalReport& report) {
    auto out = open_out(path);
    out << "final_perplexity = " << format_double(report.perplexity) << "\n";
    out << "token_total = " << report.token_total << "\n";
    out << "clamped_terms = " << report.clamped_terms << "\n";
    out << "samples = " << hyper.samples << "\n";
    out << "burn_in = " << hyper.burn_in << "\n";
    out << "seed = " << hyper.seed << "\n";
    for (size_t s = 0; s < trace.perplexity.size(); ++s)
        out << "sample " << (s + 1) << " perplexity " << format_double(trace.perplexity[s])
            << "\n";
}

int run_fit(const Cli& cli) {
    const RunConfig config = cli.merged_config();
    // Default to the snapshot preprocess writes into the output directory.
    std::string corpus_file = cli.corpus_path;
    if (corpus_file.empty())
        corpus_file = (fs::path(config.output_dir) / "corpus.txt").string();
    const Corpus corpus = load_corpus(corpus_file);
    const Hyperparams hyper = config.hyperparams(corpus.vocab.size());
    const fs::path out_dir = ensure_out_dir(config.output_dir);

    const auto results = fit_chains(corpus, hyper, config.chains);
    for (size_t c = 0; c < results.size(); ++c) {
        const auto& [estimate, trace] = results[c];
        const std::string stem =
            results.size() == 1 ? std::string("model") : "model_chain" + std::to_string(c);
        const fs::path model_path = out_dir / (stem + ".txt");
        save_model(estimate, model_path.string());
        const EvalReport report = perplexity(corpus, estimate);
        write_fit_log(out_dir / (stem + "_fit_log.txt"), trace, estimate.hyper, report);
        for (size_t s = 99; s < trace.perplexity.size(); s += 100)
            std::cout << "chain " << c << " sample " << (s + 1) << "/" << hyper.samples
                      << " perplexity " << fmt6(trace.perplexity[s]) << "\n";
        std::cout << "chain " << c << " perplexity " << fmt6(report.perplexity) << "\n";
        std::cout << "wrote\t" << model_path.string() << "\n";
    }
    return kExitOk;
}

int run_topics(const Cli& cli) {
    const RunConfig config = cli.merged_config();
    const ModelEstimate estimate = load_model(cli.model_path);
    const auto labels = label_topics(estimate, config.top_n);
    for (const auto& label : labels) {
        std::cout << label.topic;
        for (const auto& [token, prob] : label.keywords)
            std::cout << "\t" << token << " (" << fmt6(prob * 100.0) << "%)";
        std::cout << "\n";
    }
    return kExitOk;
}

int run_neighbors(const Cli& cli) {
    const RunConfig config = cli.merged_config();
    const ModelEstimate estimate = load_model(cli.model_path);
    const NeighborGraph graph = nearest_neighbors(cli.firm_id, estimate,
                                                  config.neighbor_threshold,
                                                  config.max_neighbors);
    for (const auto& n : graph.neighbors)
        std::cout << n.firm_id << "\t" << fmt6(n.similarity) << "\n";

    const fs::path out =
        ensure_out_dir(config.output_dir) / ("neighbors_" + cli.firm_id + ".dot");
    auto file = open_out(out);
    write_neighbor_dot(graph, estimate, file);
    std::cout << "wrote\t" << out.string() << "\n";
    return kExitOk;
}

int run_portfolio(const Cli& cli) {
    const RunConfig config = cli.merged_config();
    const ModelEstimate estimate = load_model(cli.model_path);
    const PortfolioWeights portfolio =
        thematic_portfolio(cli.theme, estimate, config.tau);
    if (portfolio.empty_flagged)
        std::cerr << "warning: no firm clears tau = " << fmt6(config.tau)
                  << " for theme " << cli.theme << "; portfolio is empty\n";

    const fs::path out = ensure_out_dir(config.output_dir) /
                         ("portfolio_theme" + std::to_string(cli.theme) + ".tsv");
    auto file = open_out(out);
    write_portfolio(portfolio, file);
    write_portfolio(portfolio, std::cout);
    std::cout << "wrote\t" << out.string() << "\n";
    return kExitOk;
}

int run_network(const Cli& cli) {
    const RunConfig config = cli.merged_config();
    const ModelEstimate estimate = load_model(cli.model_path);
    const IndustryNetwork network = industry_network(estimate, config.edge_threshold);
    const auto labels = label_topics(estimate, 1);

    const fs::path out_dir = ensure_out_dir(config.output_dir);
    const fs::path dot_path = out_dir / "network.dot";
    const fs::path edges_path = out_dir / "network_edges.tsv";
    {
        auto file = open_out(dot_path);
        write_network_dot(network, labels, file);
    }
    {
        auto file = open_out(edges_path);
        write_network_edge_list(network, file);
    }
    std::cout << "nodes\t" << network.nodes.size() << "\n";
    std::cout << "edges\t" << network.edges.size() << "\n";
    std::cout << "wrote\t" << dot_path.string() << "\n";
    std::cout << "wrote\t" << edges_path.string() << "\n";
    return kExitOk;
}

int run_eval(const Cli& cli) {
    const ModelEstimate estimate = load_model(cli.model_path);
    const Corpus corpus = load_corpus(cli.corpus_path);
    const EvalReport report = perplexity(corpus, estimate);
    std::cout << "perplexity\t" << fmt6(report.perplexity) << "\n";
    std::cout << "token_total\t" << report.token_total << "\n";
    std::cout << "clamped_terms\t" << report.clamped_terms << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    Cli cli;
    try {
        cli.app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return cli.app.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.app.exit(e);  // prints the diagnostic
        return kExitUsage;
    }

    try {
        if (cli.cmd_preprocess->parsed()) return run_preprocess(cli);
        if (cli.cmd_fit->parsed()) return run_fit(cli);
        if (cli.cmd_topics->parsed()) return run_topics(cli);
        if (cli.cmd_neighbors->parsed()) return run_neighbors(cli);
        if (cli.cmd_portfolio->parsed()) return run_portfolio(cli);
        if (cli.cmd_network->parsed()) return run_network(cli);
        if (cli.cmd_eval->parsed()) return run_eval(cli);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
