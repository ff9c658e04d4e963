#include "simplex/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "simplex/errors.hpp"
#include "simplex/format.hpp"

namespace simplex {
namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    for (;;) {
        const size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string sanitize_field(std::string s) {
    for (char& c : s) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

// Line reader that tracks position for error messages.
class LineReader {
public:
    LineReader(const std::string& text, std::string origin)
        : in_(text), origin_(std::move(origin)) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no_;
        return true;
    }

    std::string require(const std::string& what) {
        std::string line;
        if (!next(line)) fail("unexpected end of file, expected " + what);
        return line;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError(origin_ + ":" + std::to_string(line_no_) + ": " + msg);
    }

private:
    std::istringstream in_;
    std::string origin_;
    int line_no_ = 0;
};

// "name count" header line, e.g. "vocab 6".
int64_t parse_count_line(LineReader& reader, const std::string& name) {
    const std::string line = reader.require("'" + name + " <count>'");
    std::istringstream ss(line);
    std::string word, count;
    if (!(ss >> word >> count) || word != name || (ss >> word))
        reader.fail("expected '" + name + " <count>', got '" + line + "'");
    const int64_t n = parse_int(count);
    if (n < 0) reader.fail(name + " count must be >= 0");
    return n;
}

void write_sparse_row(std::ostream& out, const double* row, int32_t cols) {
    int32_t nnz = 0;
    for (int32_t c = 0; c < cols; ++c)
        if (row[c] != 0.0) ++nnz;
    out << nnz;
    for (int32_t c = 0; c < cols; ++c) {
        if (row[c] != 0.0) out << " " << c << ":" << format_double(row[c]);
    }
    out << "\n";
}

void parse_sparse_row(LineReader& reader, const std::string& line, double* row,
                      int32_t cols, const std::string& what) {
    try {
        std::istringstream ss(line);
        std::string field;
        if (!(ss >> field)) reader.fail("truncated " + what + ": missing entry count");
        const int64_t nnz = parse_int(field);
        std::fill(row, row + cols, 0.0);
        for (int64_t i = 0; i < nnz; ++i) {
            if (!(ss >> field)) reader.fail("truncated " + what + ": expected " +
                                            std::to_string(nnz) + " entries");
            const size_t colon = field.find(':');
            if (colon == std::string::npos) reader.fail("malformed entry in " + what);
            const int64_t col = parse_int(field.substr(0, colon));
            if (col < 0 || col >= cols) reader.fail("column out of range in " + what);
            row[col] = parse_double(field.substr(colon + 1));
        }
        if (ss >> field) reader.fail("trailing data in " + what);
    } catch (const DataError& e) {
        const std::string msg = e.what();
        if (msg.find(what) != std::string::npos) throw;
        reader.fail("truncated or malformed " + what + ": " + msg);
    }
}

}  // namespace

void RunConfig::validate() const {
    if (k < 1) throw DataError("config: k must be >= 1");
    if (!(doc_prior > 0.0)) throw DataError("config: doc_prior must be positive");
    if (!(topic_prior > 0.0)) throw DataError("config: topic_prior must be positive");
    if (samples < 1) throw DataError("config: samples must be >= 1");
    if (burn_in < 0 || burn_in >= samples)
        throw DataError("config: burn_in must satisfy 0 <= burn_in < samples");
    if (chains < 1) throw DataError("config: chains must be >= 1");
    if (!(neighbor_threshold > 0.0 && neighbor_threshold <= 1.0))
        throw DataError("config: neighbor_threshold must be in (0, 1]");
    if (max_neighbors < 0) throw DataError("config: max_neighbors must be >= 0");
    if (!(tau > 0.0 && tau < 1.0)) throw DataError("config: tau must be in (0, 1)");
    if (top_n < 1) throw DataError("config: top_n must be >= 1");
    if (edge_threshold < 0.0) throw DataError("config: edge_threshold must be >= 0");
}

Hyperparams RunConfig::hyperparams(int32_t vocab_size) const {
    return Hyperparams::symmetric(k, vocab_size, doc_prior, topic_prior, samples,
                                  burn_in, seed);
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw DataError(origin + ":" + std::to_string(line_no) +
                            ": expected 'key = value'");
        const std::string key = lower(trim(stripped.substr(0, eq)));
        const std::string value = trim(stripped.substr(eq + 1));
        try {
            if (key == "corpus_input") config.corpus_input = value;
            else if (key == "rules_file") config.rules_file = value;
            else if (key == "output_dir") config.output_dir = value;
            else if (key == "k") config.k = static_cast<int32_t>(parse_int(value));
            else if (key == "doc_prior") config.doc_prior = parse_double(value);
            else if (key == "topic_prior") config.topic_prior = parse_double(value);
            else if (key == "samples") config.samples = static_cast<int32_t>(parse_int(value));
            else if (key == "burn_in") config.burn_in = static_cast<int32_t>(parse_int(value));
            else if (key == "seed") config.seed = parse_uint(value);
            else if (key == "chains") config.chains = static_cast<int32_t>(parse_int(value));
            else if (key == "neighbor_threshold") config.neighbor_threshold = parse_double(value);
            else if (key == "max_neighbors")
                config.max_neighbors = static_cast<int32_t>(parse_int(value));
            else if (key == "tau") config.tau = parse_double(value);
            else if (key == "top_n") config.top_n = static_cast<int32_t>(parse_int(value));
            else if (key == "edge_threshold") config.edge_threshold = parse_double(value);
            else
                throw DataError("unknown key '" + key + "'");
        } catch (const DataError& e) {
            throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::string& path) {
    return parse_config(read_file(path), path);
}

std::string format_config(const RunConfig& config) {
    std::ostringstream out;
    out << "corpus_input = " << config.corpus_input << "\n";
    out << "rules_file = " << config.rules_file << "\n";
    out << "output_dir = " << config.output_dir << "\n";
    out << "k = " << config.k << "\n";
    out << "doc_prior = " << format_double(config.doc_prior) << "\n";
    out << "topic_prior = " << format_double(config.topic_prior) << "\n";
    out << "samples = " << config.samples << "\n";
    out << "burn_in = " << config.burn_in << "\n";
    out << "seed = " << config.seed << "\n";
    out << "chains = " << config.chains << "\n";
    out << "neighbor_threshold = " << format_double(config.neighbor_threshold) << "\n";
    out << "max_neighbors = " << config.max_neighbors << "\n";
    out << "tau = " << format_double(config.tau) << "\n";
    out << "top_n = " << config.top_n << "\n";
    out << "edge_threshold = " << format_double(config.edge_threshold) << "\n";
    return out.str();
}

void save_config(const RunConfig& config, const std::string& path) {
    write_file(path, format_config(config));
}

std::string format_model(const ModelEstimate& estimate) {
    const int32_t m_total = estimate.num_docs();
    const int32_t k = estimate.k();
    const int32_t v = estimate.vocab_size();
    std::ostringstream out;
    out << "SIMPLEX-MODEL v1\n";
    out << "rng " << Rng::kName << "\n";
    out << "seed " << estimate.hyper.seed << "\n";
    out << "k " << k << "\n";
    out << "samples " << estimate.hyper.samples << "\n";
    out << "burn_in " << estimate.hyper.burn_in << "\n";
    out << "doc_prior";
    for (const double a : estimate.hyper.doc_prior) out << " " << format_double(a);
    out << "\ntopic_prior";
    for (const double a : estimate.hyper.topic_prior) out << " " << format_double(a);
    out << "\nvocab_fingerprint " << format_hex(estimate.vocab_fingerprint) << "\n";
    out << "vocab " << v << "\n";
    for (const auto& token : estimate.vocab_tokens) out << token << "\n";
    out << "firms " << m_total << "\n";
    for (const auto& id : estimate.firm_ids) {
        const auto it = estimate.firm_meta.find(id);
        const FirmMeta meta = it == estimate.firm_meta.end() ? FirmMeta{} : it->second;
        out << id << "\t" << format_double(meta.size) << "\t"
            << sanitize_field(meta.display_name.empty() ? id : meta.display_name) << "\t"
            << sanitize_field(meta.tag) << "\n";
    }
    out << "theta " << m_total << " " << k << "\n";
    for (int32_t m = 0; m < m_total; ++m)
        write_sparse_row(out, estimate.theta_mean.data() + static_cast<size_t>(m) * k, k);
    out << "phi " << k << " " << v << "\n";
    for (int32_t topic = 0; topic < k; ++topic)
        write_sparse_row(out, estimate.phi_mean.data() + static_cast<size_t>(topic) * v, v);
    out << "incidence";
    for (const double x : estimate.incidence) out << " " << format_double(x);
    out << "\n";
    return out.str();
}

ModelEstimate parse_model(const std::string& text, const std::string& origin) {
    LineReader reader(text, origin);
    const std::string header = reader.require("header");
    if (header != "SIMPLEX-MODEL v1")
        reader.fail("version mismatch: expected 'SIMPLEX-MODEL v1', got '" + header + "'");

    ModelEstimate estimate;
    const auto expect_kv = [&reader](const std::string& key) {
        const std::string line = reader.require("'" + key + " ...'");
        if (line.rfind(key + " ", 0) != 0)
            reader.fail("expected '" + key + " ...', got '" + line + "'");
        return line.substr(key.size() + 1);
    };

    const std::string rng_name = expect_kv("rng");
    if (rng_name != Rng::kName)
        reader.fail("unsupported rng '" + rng_name + "' (this build uses " +
                    std::string(Rng::kName) + ")");
    estimate.hyper.seed = parse_uint(expect_kv("seed"));
    estimate.hyper.k = static_cast<int32_t>(parse_int(expect_kv("k")));
    estimate.hyper.samples = static_cast<int32_t>(parse_int(expect_kv("samples")));
    estimate.hyper.burn_in = static_cast<int32_t>(parse_int(expect_kv("burn_in")));
    {
        std::istringstream ss(expect_kv("doc_prior"));
        std::string field;
        while (ss >> field) estimate.hyper.doc_prior.push_back(parse_double(field));
    }
    {
        std::istringstream ss(expect_kv("topic_prior"));
        std::string field;
        while (ss >> field) estimate.hyper.topic_prior.push_back(parse_double(field));
    }
    estimate.vocab_fingerprint = parse_hex(expect_kv("vocab_fingerprint"));

    const int64_t v = parse_count_line(reader, "vocab");
    for (int64_t i = 0; i < v; ++i)
        estimate.vocab_tokens.push_back(reader.require("vocabulary token"));

    const int64_t m_total = parse_count_line(reader, "firms");
    for (int64_t i = 0; i < m_total; ++i) {
        const auto fields = split_tabs(reader.require("firm line"));
        if (fields.size() != 4) reader.fail("expected firm_id<TAB>size<TAB>name<TAB>tag");
        estimate.firm_ids.push_back(fields[0]);
        estimate.firm_meta.emplace(
            fields[0],
            FirmMeta{.size = parse_double(fields[1]), .display_name = fields[2],
                     .tag = fields[3]});
    }

    const auto read_matrix = [&reader](const std::string& name, int64_t rows, int64_t cols,
                                       std::vector<double>& out) {
        const std::string head = reader.require("'" + name + " <rows> <cols>'");
        std::istringstream ss(head);
        std::string word, r, c;
        if (!(ss >> word >> r >> c) || word != name)
            reader.fail("expected '" + name + " <rows> <cols>', got '" + head + "'");
        if (parse_int(r) != rows || parse_int(c) != cols)
            reader.fail(name + " dimensions do not match header counts");
        out.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0);
        for (int64_t row = 0; row < rows; ++row) {
            std::string line;
            if (!reader.next(line))
                reader.fail("truncated " + name + " matrix: missing row " +
                            std::to_string(row));
            parse_sparse_row(reader, line, out.data() + static_cast<size_t>(row) * cols,
                             static_cast<int32_t>(cols),
                             name + " row " + std::to_string(row));
        }
    };
    read_matrix("theta", m_total, estimate.hyper.k, estimate.theta_mean);
    read_matrix("phi", estimate.hyper.k, v, estimate.phi_mean);

    {
        std::istringstream ss(expect_kv("incidence"));
        std::string field;
        while (ss >> field) estimate.incidence.push_back(parse_double(field));
        if (static_cast<int32_t>(estimate.incidence.size()) != estimate.hyper.k)
            reader.fail("incidence length does not match k");
    }

    if (static_cast<int32_t>(estimate.hyper.doc_prior.size()) != estimate.hyper.k)
        reader.fail("doc_prior length does not match k");
    if (static_cast<int64_t>(estimate.hyper.topic_prior.size()) != v)
        reader.fail("topic_prior length does not match vocabulary size");
    return estimate;
}

void save_model(const ModelEstimate& estimate, const std::string& path) {
    write_file(path, format_model(estimate));
}

ModelEstimate load_model(const std::string& path) {
    return parse_model(read_file(path), path);
}

std::string format_corpus(const Corpus& corpus) {
    std::ostringstream out;
    out << "SIMPLEX-CORPUS v1\n";
    out << "firms " << corpus.docs.size() << "\n";
    out << "vocab " << corpus.vocab.size() << "\n";
    for (const auto& doc : corpus.docs) {
        const auto it = corpus.firm_meta.find(doc.firm_id);
        const FirmMeta meta = it == corpus.firm_meta.end() ? FirmMeta{} : it->second;
        out << "firm\t" << doc.firm_id << "\t" << format_double(meta.size) << "\t"
            << sanitize_field(meta.display_name.empty() ? doc.firm_id : meta.display_name)
            << "\t" << sanitize_field(meta.tag) << "\n";
    }
    for (const auto& token : corpus.vocab.tokens()) out << token << "\n";
    for (const auto& doc : corpus.docs) {
        out << "doc\t" << doc.firm_id << "\t" << doc.counts.size();
        for (const auto& [word, count] : doc.counts) out << "\t" << word << ":" << count;
        out << "\n";
    }
    return out.str();
}

Corpus parse_corpus(const std::string& text, const std::string& origin) {
    LineReader reader(text, origin);
    const std::string header = reader.require("header");
    if (header != "SIMPLEX-CORPUS v1")
        reader.fail("version mismatch: expected 'SIMPLEX-CORPUS v1', got '" + header + "'");

    Corpus corpus;
    const int64_t m_total = parse_count_line(reader, "firms");
    const int64_t v = parse_count_line(reader, "vocab");

    std::vector<std::string> firm_order;
    for (int64_t i = 0; i < m_total; ++i) {
        const auto fields = split_tabs(reader.require("firm line"));
        if (fields.size() != 5 || fields[0] != "firm")
            reader.fail("expected firm<TAB>id<TAB>size<TAB>name<TAB>tag");
        firm_order.push_back(fields[1]);
        corpus.firm_meta.emplace(
            fields[1],
            FirmMeta{.size = parse_double(fields[2]), .display_name = fields[3],
                     .tag = fields[4]});
    }
    for (int64_t i = 0; i < v; ++i) {
        const std::string token = reader.require("vocabulary token");
        if (token.empty()) reader.fail("empty vocabulary token");
        corpus.vocab.add(token);
    }
    if (corpus.vocab.size() != v) reader.fail("duplicate vocabulary token");

    for (int64_t i = 0; i < m_total; ++i) {
        const auto fields = split_tabs(reader.require("doc line"));
        if (fields.size() < 3 || fields[0] != "doc")
            reader.fail("expected doc<TAB>id<TAB>nnz<TAB>entries...");
        BowDocument doc;
        doc.firm_id = fields[1];
        if (doc.firm_id != firm_order[static_cast<size_t>(i)])
            reader.fail("doc order does not match firm block at '" + doc.firm_id + "'");
        const int64_t nnz = parse_int(fields[2]);
        if (static_cast<int64_t>(fields.size()) != 3 + nnz)
            reader.fail("doc '" + doc.firm_id + "' has " +
                        std::to_string(fields.size() - 3) + " entries, header says " +
                        std::to_string(nnz));
        int32_t prev = -1;
        for (int64_t e = 0; e < nnz; ++e) {
            const std::string& field = fields[static_cast<size_t>(3 + e)];
            const size_t colon = field.find(':');
            if (colon == std::string::npos) reader.fail("malformed count entry '" + field + "'");
            const auto word = static_cast<int32_t>(parse_int(field.substr(0, colon)));
            const int64_t count = parse_int(field.substr(colon + 1));
            if (word < 0 || word >= v) reader.fail("word id out of range in doc '" + doc.firm_id + "'");
            if (word <= prev) reader.fail("word ids not strictly increasing in doc '" + doc.firm_id + "'");
            if (count < 1) reader.fail("count must be >= 1 in doc '" + doc.firm_id + "'");
            doc.counts.emplace_back(word, count);
            doc.total_tokens += count;
            prev = word;
        }
        if (doc.empty())
            corpus.warnings.push_back("empty document excluded from fitting: " + doc.firm_id);
        corpus.docs.push_back(std::move(doc));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    write_file(path, format_corpus(corpus));
}

Corpus load_corpus(const std::string& path) {
    return parse_corpus(read_file(path), path);
}

std::vector<RawRecord> read_firm_records(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<RawRecord> records;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_tabs(line);
        RawRecord record;
        record.firm_id = fields[0];
        if (record.firm_id.empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": empty firm id");
        if (fields.size() == 2) {
            record.text = fields[1];
        } else if (fields.size() == 3) {
            try {
                record.size = parse_double(fields[1]);
            } catch (const DataError&) {
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": size field is not a number: '" + fields[1] + "'");
            }
            if (*record.size < 0.0)
                throw DataError(path + ":" + std::to_string(line_no) + ": negative size");
            record.text = fields[2];
        } else {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected firm_id<TAB>[size<TAB>]raw_text (" +
                            std::to_string(fields.size()) + " fields)");
        }
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace simplex
