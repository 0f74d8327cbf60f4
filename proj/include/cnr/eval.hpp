#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnr/blocks.hpp"
#include "cnr/dom.hpp"
#include "cnr/error.hpp"
#include "cnr/html_parser.hpp"
#include "cnr/path.hpp"
#include "cnr/ratio.hpp"

namespace cnr {

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1_score(double precision, double recall) {
    const double sum = precision + recall;
    return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

struct EvalReport {
    std::string document_id;
    std::size_t dom_nodes = 0;
    std::size_t main_block_nodes = 0;
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

/// Node-level recall and precision of the subtree at `retrieved` against the
/// subtree at `gold`. Whole subtrees count, non-content nodes included.
inline EvalReport score(const DomTree& tree, NodeId retrieved, NodeId gold) {
    const std::size_t retrieved_size = tree.subtree_size(retrieved);
    const std::size_t gold_size = tree.subtree_size(gold);
    // Two subtrees are either nested or disjoint, so the intersection is the
    // smaller one or nothing.
    std::size_t overlap = 0;
    if (tree.is_ancestor(retrieved, gold)) {
        overlap = gold_size;
    } else if (tree.is_ancestor(gold, retrieved)) {
        overlap = retrieved_size;
    }
    EvalReport report;
    report.dom_nodes = tree.size();
    report.main_block_nodes = retrieved_size;
    report.recall = static_cast<double>(overlap) / static_cast<double>(gold_size);
    report.precision = static_cast<double>(overlap) / static_cast<double>(retrieved_size);
    report.f1 = f1_score(report.precision, report.recall);
    return report;
}

struct DocumentError {
    std::string document_id;
    std::string message;
};

struct CorpusResult {
    std::vector<EvalReport> reports; // sorted by document id
    std::vector<DocumentError> errors;
    double mean_recall = 0.0;
    double mean_precision = 0.0;
    double mean_f1 = 0.0;
};

/// documentId -> goldPath, read from a gold.json object.
inline std::map<std::string, std::string> load_gold_manifest(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorCode::ManifestError, "cannot open " + file.string());
    }
    std::map<std::string, std::string> manifest;
    try {
        const auto j = nlohmann::json::parse(in);
        if (!j.is_object()) {
            throw Error(ErrorCode::ManifestError, file.string() + " must hold a JSON object");
        }
        for (const auto& [key, value] : j.items()) {
            if (!value.is_string()) {
                throw Error(ErrorCode::ManifestError, "gold path for '" + key + "' must be a string");
            }
            manifest.emplace(key, value.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ManifestError, file.string() + ": " + e.what());
    }
    return manifest;
}

inline std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ManifestError, "cannot read " + file.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Extracts and scores every document listed in corpus_dir/gold.json. A
/// document whose file or gold path cannot be resolved is reported in
/// `errors` and left out of the means.
inline CorpusResult run_corpus(const std::filesystem::path& corpus_dir, const SelectionConfig& selection = {},
                               const ClassifierConfig& classifier = {}) {
    const auto manifest = load_gold_manifest(corpus_dir / "gold.json");
    CorpusResult result;
    for (const auto& [doc, gold_path] : manifest) {
        try {
            AnnotatedTree atree = compute_cnr(parse_html(read_file(corpus_dir / doc)), classifier);
            NodeId gold;
            try {
                gold = resolve_path(atree.tree(), gold_path);
            } catch (const Error& e) {
                throw Error(ErrorCode::ManifestError, e.what());
            }
            EvalReport report = score(atree.tree(), extract_main(atree, selection), gold);
            report.document_id = doc;
            result.reports.push_back(std::move(report));
        } catch (const Error& e) {
            result.errors.push_back({doc, e.what()});
        }
    }
    if (!result.reports.empty()) {
        const auto n = static_cast<double>(result.reports.size());
        for (const auto& r : result.reports) {
            result.mean_recall += r.recall;
            result.mean_precision += r.precision;
            result.mean_f1 += r.f1;
        }
        result.mean_recall /= n;
        result.mean_precision /= n;
        result.mean_f1 /= n;
    }
    return result;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["documentId"] = r.document_id;
    j["domNodes"] = r.dom_nodes;
    j["mainBlockNodes"] = r.main_block_nodes;
    j["recall"] = r.recall;
    j["precision"] = r.precision;
    j["f1"] = r.f1;
    return j;
}

/// One JSON object per line: the reports, then per-document errors, then an
/// aggregate record.
inline std::string to_json_lines(const CorpusResult& result) {
    std::string out;
    for (const auto& r : result.reports) {
        out += to_json(r).dump();
        out += '\n';
    }
    for (const auto& e : result.errors) {
        nlohmann::ordered_json j;
        j["documentId"] = e.document_id;
        j["error"] = e.message;
        out += j.dump();
        out += '\n';
    }
    nlohmann::ordered_json agg;
    agg["aggregate"] = true;
    agg["documents"] = result.reports.size();
    agg["errors"] = result.errors.size();
    agg["recall"] = result.mean_recall;
    agg["precision"] = result.mean_precision;
    agg["f1"] = result.mean_f1;
    out += agg.dump();
    out += '\n';
    return out;
}

/// Benchmark table: node counts plus recall, precision and F1 as
/// percentages, closed by an "Average" row.
inline std::string to_csv(const CorpusResult& result) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "Benchmark,DOM nodes,Main block,Recall,Precision,F1\n";
    for (const auto& r : result.reports) {
        out << r.document_id << ',' << r.dom_nodes << ',' << r.main_block_nodes << ',' << r.recall * 100 << ','
            << r.precision * 100 << ',' << r.f1 * 100 << '\n';
    }
    out << "Average,,," << result.mean_recall * 100 << ',' << result.mean_precision * 100 << ','
        << result.mean_f1 * 100 << '\n';
    return out.str();
}

} // namespace cnr
