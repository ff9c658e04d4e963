#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "simplex/sampler.hpp"

namespace simplex {

struct TopicLabel {
    int32_t topic = 0;
    std::vector<std::pair<std::string, double>> keywords;  // descending phi
    std::string display_name;
};

struct Neighbor {
    std::string firm_id;
    double similarity = 0.0;
};

struct NeighborGraph {
    std::string focal;
    std::vector<Neighbor> neighbors;  // descending similarity, ties by id
    // Neighbor pairs whose own similarity also clears the threshold.
    std::vector<std::tuple<std::string, std::string, double>> edges;
    double threshold = 0.0;
};

struct PortfolioHolding {
    std::string firm_id;
    double weight = 0.0;
};

struct PortfolioWeights {
    int32_t theme = 0;
    std::vector<PortfolioHolding> holdings;  // descending weight, ties by id
    double inclusion_threshold = 0.0;        // tau
    bool empty_flagged = false;              // no firm cleared tau
};

struct IndustryNode {
    int32_t topic = 0;
    double incidence = 0.0;
    std::string dominant_tag;  // most theta-weighted firm tag, "" if untagged
};

struct IndustryEdge {
    int32_t a = 0;
    int32_t b = 0;
    double score = 0.0;  // mean over firms of theta[m,a] * theta[m,b]
};

struct IndustryNetwork {
    std::vector<IndustryNode> nodes;
    std::vector<IndustryEdge> edges;
    double edge_threshold = 0.0;
};

// 1 - (1/sqrt(2)) * ||sqrt(p) - sqrt(q)||_2, in [0, 1], symmetric, and 1
// exactly when p == q.
double hellinger_similarity(std::span<const double> p, std::span<const double> q);

// Firms with similarity >= threshold to the focal firm (focal excluded),
// sorted descending, truncated to max_n.
NeighborGraph nearest_neighbors(const std::string& focal, const ModelEstimate& estimate,
                                double threshold, int32_t max_n);

// Includes firms with theta[m, theme] >= tau, weighted by
// sqrt(size) * theta[m, theme], normalized to sum 1.
PortfolioWeights thematic_portfolio(int32_t theme, const ModelEstimate& estimate,
                                    const std::map<std::string, FirmMeta>& firm_meta,
                                    double tau);
PortfolioWeights thematic_portfolio(int32_t theme, const ModelEstimate& estimate, double tau);

// Top-n keywords per topic, descending probability, ties token-lexicographic.
std::vector<TopicLabel> label_topics(const ModelEstimate& estimate, int32_t top_n);

IndustryNetwork industry_network(const ModelEstimate& estimate, double edge_threshold);

void write_neighbor_dot(const NeighborGraph& graph, const ModelEstimate& estimate,
                        std::ostream& out);
void write_network_dot(const IndustryNetwork& network, const std::vector<TopicLabel>& labels,
                       std::ostream& out);
void write_network_edge_list(const IndustryNetwork& network, std::ostream& out);
// Tab-separated firm_id<TAB>weight lines, descending weight.
void write_portfolio(const PortfolioWeights& portfolio, std::ostream& out);

}  // namespace simplex
