#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semtower/embed.hpp"
#include "semtower/ingest.hpp"
#include "semtower/ragpipe.hpp"

namespace semtower {

struct ExperimentConfig {
    std::string name;
    std::string dataset_path;
    std::optional<DatasetFormat> dataset_format;  // inferred from the path when unset
    PromptMode mode = PromptMode::baseline;
    std::string tower_path;  // required in rag mode
    EmbedderConfig embedder;
    LlmConfig llm;
    std::string output_path;  // report JSON; "" skips writing
    int jobs = 1;             // 0 lets the runtime pick

    void validate() const;
};

struct TypeCounts {
    std::size_t gold = 0;
    std::size_t predicted = 0;
    std::size_t correct = 0;
};

struct ExperimentReport {
    std::string name;
    std::size_t n_records = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<std::pair<std::string, TypeCounts>> per_type_counts;  // inventory order
    std::vector<std::string> failures;  // ids of records whose typing failed
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Single-label micro averaging: precision = recall = f1 = correct/total.
// Inputs must be equal-length and aligned by record id.
Metrics micro_metrics(const std::vector<Prediction>& predictions,
                      const std::vector<TermRecord>& golds);

// Types every dataset record through the pipeline (optionally in
// parallel), computes metrics over the successfully typed records, and
// writes the report when an output path is configured. Per-record
// failures are collected, not fatal.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Config JSON: {"name", "dataset", "format"?, "mode", "tower"?,
// "embedder": {"kind", "dim", "endpoint"?, "model"?},
// "llm": {"kind", "endpoint"?, "script"?}, "output"?, "jobs"?}.
// Remote endpoints left empty fall back to SEMTOWER_EMBED_ENDPOINT /
// SEMTOWER_LLM_ENDPOINT.
ExperimentConfig load_experiment_config(const std::string& path);

void save_report(const ExperimentReport& report, const std::string& path);
ExperimentReport load_report(const std::string& path);

// Paper-style table: one row of F1/precision/recall.
std::string render_report_table(const ExperimentReport& report);

struct TypeDelta {
    std::string type_label;
    long long predicted_delta = 0;
    long long correct_delta = 0;
};

struct ReportDelta {
    double f1_delta = 0.0;
    double precision_delta = 0.0;
    double recall_delta = 0.0;
    std::vector<TypeDelta> per_type;  // types whose confusion counts moved
};

// a minus b; both reports must describe the same dataset (record count
// and per-type gold counts).
ReportDelta compare_reports(const ExperimentReport& a, const ExperimentReport& b);

std::string render_delta(const ReportDelta& delta);

}  // namespace semtower
