#include "simplex/applications.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "simplex/errors.hpp"
#include "simplex/format.hpp"

namespace simplex {
namespace {

// DOT string literals: escape quotes and backslashes.
std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

const FirmMeta* find_meta(const std::map<std::string, FirmMeta>& meta,
                          const std::string& firm_id) {
    const auto it = meta.find(firm_id);
    return it == meta.end() ? nullptr : &it->second;
}

}  // namespace

double hellinger_similarity(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty())
        throw DataError("hellinger_similarity: dimension mismatch");
    double sq_norm = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        sq_norm += d * d;
    }
    const double sim = 1.0 - std::sqrt(sq_norm / 2.0);
    // Float noise can land epsilon outside [0, 1]; the contract is exact.
    return std::clamp(sim, 0.0, 1.0);
}

NeighborGraph nearest_neighbors(const std::string& focal, const ModelEstimate& estimate,
                                double threshold, int32_t max_n) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw DataError("nearest_neighbors: threshold must be in (0, 1]");
    if (max_n < 0) throw DataError("nearest_neighbors: max_n must be >= 0");
    const auto focal_row = estimate.row_of(focal);
    if (!focal_row) throw DataError("nearest_neighbors: unknown firm id '" + focal + "'");

    NeighborGraph graph;
    graph.focal = focal;
    graph.threshold = threshold;
    for (int32_t m = 0; m < estimate.num_docs(); ++m) {
        if (m == *focal_row) continue;
        const double sim =
            hellinger_similarity(estimate.theta_row(*focal_row), estimate.theta_row(m));
        if (sim >= threshold)
            graph.neighbors.push_back({estimate.firm_ids[m], sim});
    }
    std::sort(graph.neighbors.begin(), graph.neighbors.end(),
              [](const Neighbor& a, const Neighbor& b) {
                  if (a.similarity != b.similarity) return a.similarity > b.similarity;
                  return a.firm_id < b.firm_id;
              });
    if (static_cast<int32_t>(graph.neighbors.size()) > max_n)
        graph.neighbors.resize(static_cast<size_t>(max_n));

    // The same similarity threshold applies pairwise among the neighbors.
    for (size_t i = 0; i < graph.neighbors.size(); ++i) {
        const auto row_i = estimate.row_of(graph.neighbors[i].firm_id);
        for (size_t j = i + 1; j < graph.neighbors.size(); ++j) {
            const auto row_j = estimate.row_of(graph.neighbors[j].firm_id);
            const double sim =
                hellinger_similarity(estimate.theta_row(*row_i), estimate.theta_row(*row_j));
            if (sim >= threshold)
                graph.edges.emplace_back(graph.neighbors[i].firm_id,
                                         graph.neighbors[j].firm_id, sim);
        }
    }
    return graph;
}

PortfolioWeights thematic_portfolio(int32_t theme, const ModelEstimate& estimate,
                                    const std::map<std::string, FirmMeta>& firm_meta,
                                    double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw DataError("thematic_portfolio: tau must be in (0, 1)");
    if (theme < 0 || theme >= estimate.k())
        throw DataError("thematic_portfolio: theme out of range");

    PortfolioWeights portfolio;
    portfolio.theme = theme;
    portfolio.inclusion_threshold = tau;
    double total = 0.0;
    for (int32_t m = 0; m < estimate.num_docs(); ++m) {
        const double prob = estimate.theta_row(m)[theme];
        if (prob < tau) continue;
        const FirmMeta* meta = find_meta(firm_meta, estimate.firm_ids[m]);
        const double size = meta ? meta->size : 1.0;
        const double raw = std::sqrt(size) * prob;
        portfolio.holdings.push_back({estimate.firm_ids[m], raw});
        total += raw;
    }
    if (portfolio.holdings.empty() || total <= 0.0) {
        portfolio.holdings.clear();
        portfolio.empty_flagged = true;
        return portfolio;
    }
    for (auto& holding : portfolio.holdings) holding.weight /= total;
    std::sort(portfolio.holdings.begin(), portfolio.holdings.end(),
              [](const PortfolioHolding& a, const PortfolioHolding& b) {
                  if (a.weight != b.weight) return a.weight > b.weight;
                  return a.firm_id < b.firm_id;
              });
    return portfolio;
}

PortfolioWeights thematic_portfolio(int32_t theme, const ModelEstimate& estimate, double tau) {
    return thematic_portfolio(theme, estimate, estimate.firm_meta, tau);
}

std::vector<TopicLabel> label_topics(const ModelEstimate& estimate, int32_t top_n) {
    if (top_n < 1) throw DataError("label_topics: top_n must be >= 1");
    std::vector<TopicLabel> labels;
    labels.reserve(static_cast<size_t>(estimate.k()));
    for (int32_t topic = 0; topic < estimate.k(); ++topic) {
        TopicLabel label;
        label.topic = topic;
        const auto row = estimate.phi_row(topic);
        for (int32_t word = 0; word < estimate.vocab_size(); ++word)
            label.keywords.emplace_back(estimate.vocab_tokens[word], row[word]);
        std::sort(label.keywords.begin(), label.keywords.end(),
                  [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                  });
        if (static_cast<int32_t>(label.keywords.size()) > top_n)
            label.keywords.resize(static_cast<size_t>(top_n));
        labels.push_back(std::move(label));
    }
    return labels;
}

IndustryNetwork industry_network(const ModelEstimate& estimate, double edge_threshold) {
    if (edge_threshold < 0.0)
        throw DataError("industry_network: edge_threshold must be >= 0");

    IndustryNetwork network;
    network.edge_threshold = edge_threshold;
    const int32_t k = estimate.k();
    const int32_t m_total = estimate.num_docs();

    for (int32_t topic = 0; topic < k; ++topic) {
        IndustryNode node;
        node.topic = topic;
        node.incidence = estimate.incidence[topic];
        // Dominant tag: the firm tag with the highest total theta mass.
        // Ordered map iteration makes ties break toward the lex-smaller tag.
        std::map<std::string, double> tag_mass;
        for (int32_t m = 0; m < m_total; ++m) {
            const FirmMeta* meta = find_meta(estimate.firm_meta, estimate.firm_ids[m]);
            if (!meta || meta->tag.empty()) continue;
            tag_mass[meta->tag] += estimate.theta_row(m)[topic];
        }
        double best_mass = 0.0;
        for (const auto& [tag, mass] : tag_mass) {
            if (mass > best_mass) {
                best_mass = mass;
                node.dominant_tag = tag;
            }
        }
        network.nodes.push_back(std::move(node));
    }

    for (int32_t a = 0; a < k; ++a) {
        for (int32_t b = a + 1; b < k; ++b) {
            double score = 0.0;
            for (int32_t m = 0; m < m_total; ++m) {
                const auto row = estimate.theta_row(m);
                score += row[a] * row[b];
            }
            score /= static_cast<double>(m_total);
            if (score >= edge_threshold) network.edges.push_back({a, b, score});
        }
    }
    return network;
}

void write_neighbor_dot(const NeighborGraph& graph, const ModelEstimate& estimate,
                        std::ostream& out) {
    out << "graph neighbors {\n";
    out << "  " << dot_quote(graph.focal) << " [focal=true";
    if (const FirmMeta* meta = find_meta(estimate.firm_meta, graph.focal)) {
        out << ", size=" << format_double(meta->size);
        if (!meta->tag.empty()) out << ", tag=" << dot_quote(meta->tag);
    }
    out << "]\n";
    for (const auto& n : graph.neighbors) {
        out << "  " << dot_quote(n.firm_id) << " [";
        const FirmMeta* meta = find_meta(estimate.firm_meta, n.firm_id);
        out << "size=" << format_double(meta ? meta->size : 1.0);
        if (meta && !meta->tag.empty()) out << ", tag=" << dot_quote(meta->tag);
        out << "]\n";
    }
    for (const auto& n : graph.neighbors) {
        out << "  " << dot_quote(graph.focal) << " -- " << dot_quote(n.firm_id)
            << " [weight=" << format_double(n.similarity) << "]\n";
    }
    for (const auto& [a, b, sim] : graph.edges) {
        out << "  " << dot_quote(a) << " -- " << dot_quote(b)
            << " [weight=" << format_double(sim) << "]\n";
    }
    out << "}\n";
}

void write_network_dot(const IndustryNetwork& network, const std::vector<TopicLabel>& labels,
                       std::ostream& out) {
    out << "graph industries {\n";
    for (const auto& node : network.nodes) {
        std::string name = "topic" + std::to_string(node.topic);
        if (static_cast<size_t>(node.topic) < labels.size() &&
            !labels[node.topic].keywords.empty())
            name = labels[node.topic].keywords.front().first;
        out << "  " << node.topic << " [label=" << dot_quote(name)
            << ", incidence=" << format_double(node.incidence);
        if (!node.dominant_tag.empty()) out << ", tag=" << dot_quote(node.dominant_tag);
        out << "]\n";
    }
    for (const auto& edge : network.edges) {
        out << "  " << edge.a << " -- " << edge.b
            << " [weight=" << format_double(edge.score) << "]\n";
    }
    out << "}\n";
}

void write_network_edge_list(const IndustryNetwork& network, std::ostream& out) {
    for (const auto& edge : network.edges)
        out << edge.a << "\t" << edge.b << "\t" << format_double(edge.score) << "\n";
}

void write_portfolio(const PortfolioWeights& portfolio, std::ostream& out) {
    for (const auto& holding : portfolio.holdings)
        out << holding.firm_id << "\t" << format_double(holding.weight) << "\n";
}

}  // namespace simplex
