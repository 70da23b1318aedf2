#include "semtower/eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "semtower/curate.hpp"
#include "semtower/errors.hpp"
#include "semtower/tower.hpp"

namespace semtower {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

}  // namespace

void ExperimentConfig::validate() const {
    if (name.empty()) throw Error("experiment config: name is empty");
    if (dataset_path.empty()) throw Error("experiment config: dataset path is empty");
    if (mode == PromptMode::rag && tower_path.empty()) {
        throw Error("experiment config: rag mode requires a tower path");
    }
    if (jobs < 0) throw Error("experiment config: jobs must be >= 0");
    embedder.validate();
    llm.validate();
}

Metrics micro_metrics(const std::vector<Prediction>& predictions,
                      const std::vector<TermRecord>& golds) {
    if (predictions.size() != golds.size()) {
        throw Error("micro_metrics: " + std::to_string(predictions.size()) +
                    " predictions vs " + std::to_string(golds.size()) + " gold records");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].id != golds[i].id) {
            throw Error("micro_metrics: id mismatch at position " + std::to_string(i) +
                        ": '" + predictions[i].id + "' vs '" + golds[i].id + "'");
        }
        if (!golds[i].gold_type) {
            throw Error("micro_metrics: record '" + golds[i].id + "' has no gold type");
        }
        if (predictions[i].predicted_type == *golds[i].gold_type) ++correct;
    }
    if (predictions.empty()) return {0.0, 0.0, 0.0};
    const double acc = static_cast<double>(correct) / static_cast<double>(predictions.size());
    return {acc, acc, acc};
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    const auto format =
        cfg.dataset_format ? *cfg.dataset_format : dataset_format_from_path(cfg.dataset_path);
    const Dataset dataset = load_dataset(cfg.dataset_path, format);
    for (const auto& r : dataset.records) {
        if (!r.gold_type) {
            throw Error("run_experiment: record '" + r.id +
                        "' has no type label; evaluation needs a labeled dataset");
        }
    }

    std::optional<SemanticTower> tower;
    if (cfg.mode == PromptMode::rag) tower = load_tower(cfg.tower_path);
    const SemanticTower* tower_ptr = tower ? &*tower : nullptr;

    const auto n = dataset.records.size();
    std::vector<std::optional<Prediction>> slots(n);
    std::vector<std::string> errors(n);

#ifdef _OPENMP
    const int num_threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#else
    const int num_threads = 1;
#endif

#pragma omp parallel for schedule(dynamic) num_threads(num_threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const auto& record = dataset.records[static_cast<std::size_t>(i)];
        try {
            slots[i] = type_term(record, cfg.mode, tower_ptr, cfg.llm, cfg.embedder,
                                 dataset.type_inventory);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    ExperimentReport report;
    report.name = cfg.name;
    report.n_records = n;

    std::vector<Prediction> predictions;
    std::vector<TermRecord> golds;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) {
            predictions.push_back(*slots[i]);
            golds.push_back(dataset.records[i]);
        } else {
            std::cerr << "record " << dataset.records[i].id << " failed: " << errors[i]
                      << '\n';
            report.failures.push_back(dataset.records[i].id);
        }
    }

    const auto metrics = micro_metrics(predictions, golds);
    report.precision = metrics.precision;
    report.recall = metrics.recall;
    report.f1 = metrics.f1;

    std::unordered_map<std::string, TypeCounts> counts;
    for (const auto& r : dataset.records) ++counts[*r.gold_type].gold;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        ++counts[predictions[i].predicted_type].predicted;
        if (predictions[i].predicted_type == *golds[i].gold_type) {
            ++counts[predictions[i].predicted_type].correct;
        }
    }
    for (const auto& label : dataset.type_inventory) {
        report.per_type_counts.emplace_back(label, counts[label]);
    }

    if (!cfg.output_path.empty()) save_report(report, cfg.output_path);
    return report;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": malformed config (" + std::string(e.what()) + ")");
    }
    if (!j.is_object()) throw ParseError(path + ": config must be a JSON object");

    auto get_string = [&](const nlohmann::json& obj, const char* key,
                          const std::string& fallback) -> std::string {
        if (!obj.contains(key)) return fallback;
        if (!obj[key].is_string()) {
            throw ParseError(path + ": '" + key + "' must be a string");
        }
        return obj[key].get<std::string>();
    };

    ExperimentConfig cfg;
    cfg.name = get_string(j, "name", "");
    cfg.dataset_path = get_string(j, "dataset", "");
    const auto format = get_string(j, "format", "");
    if (format == "jsonl") cfg.dataset_format = DatasetFormat::jsonl;
    else if (format == "tsv") cfg.dataset_format = DatasetFormat::tsv;
    else if (!format.empty()) throw ParseError(path + ": unknown format '" + format + "'");

    const auto mode = get_string(j, "mode", "baseline");
    if (mode == "baseline") cfg.mode = PromptMode::baseline;
    else if (mode == "rag") cfg.mode = PromptMode::rag;
    else throw ParseError(path + ": unknown mode '" + mode + "'");

    cfg.tower_path = get_string(j, "tower", "");
    cfg.output_path = get_string(j, "output", "");
    if (j.contains("jobs")) {
        if (!j["jobs"].is_number_integer()) throw ParseError(path + ": 'jobs' must be an integer");
        cfg.jobs = j["jobs"].get<int>();
    }

    if (j.contains("embedder")) {
        const auto& e = j["embedder"];
        if (!e.is_object()) throw ParseError(path + ": 'embedder' must be an object");
        const auto kind = get_string(e, "kind", "reference");
        if (kind == "reference") cfg.embedder.kind = EmbedderKind::reference;
        else if (kind == "remote") cfg.embedder.kind = EmbedderKind::remote;
        else throw ParseError(path + ": unknown embedder kind '" + kind + "'");
        if (e.contains("dim")) {
            if (!e["dim"].is_number_unsigned()) {
                throw ParseError(path + ": embedder 'dim' must be a positive integer");
            }
            cfg.embedder.dim = e["dim"].get<std::size_t>();
        }
        cfg.embedder.endpoint = get_string(e, "endpoint", "");
        cfg.embedder.model_name = get_string(e, "model", "");
    }
    if (cfg.embedder.kind == EmbedderKind::remote && cfg.embedder.endpoint.empty()) {
        cfg.embedder.endpoint = env_or_empty("SEMTOWER_EMBED_ENDPOINT");
    }

    if (j.contains("llm")) {
        const auto& l = j["llm"];
        if (!l.is_object()) throw ParseError(path + ": 'llm' must be an object");
        const auto kind = get_string(l, "kind", "echo_hint");
        if (kind == "echo_hint") cfg.llm.kind = LlmKind::echo_hint;
        else if (kind == "scripted") cfg.llm.kind = LlmKind::scripted;
        else if (kind == "remote") cfg.llm.kind = LlmKind::remote;
        else throw ParseError(path + ": unknown llm kind '" + kind + "'");
        cfg.llm.endpoint = get_string(l, "endpoint", "");
        if (l.contains("script")) {
            if (!l["script"].is_object()) {
                throw ParseError(path + ": llm 'script' must be an object");
            }
            for (const auto& [term, answer] : l["script"].items()) {
                if (!answer.is_string()) {
                    throw ParseError(path + ": scripted answer for '" + term +
                                     "' is not a string");
                }
                cfg.llm.script[term] = answer.get<std::string>();
            }
        }
    }
    if (cfg.llm.kind == LlmKind::remote && cfg.llm.endpoint.empty()) {
        cfg.llm.endpoint = env_or_empty("SEMTOWER_LLM_ENDPOINT");
    }

    return cfg;
}

void save_report(const ExperimentReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["name"] = report.name;
    j["n_records"] = report.n_records;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["per_type_counts"] = nlohmann::ordered_json::array();
    for (const auto& [label, c] : report.per_type_counts) {
        j["per_type_counts"].push_back({{"type", label},
                                        {"gold", c.gold},
                                        {"predicted", c.predicted},
                                        {"correct", c.correct}});
    }
    j["failures"] = report.failures;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open report file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for report file: " + path);
}

ExperimentReport load_report(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": malformed report (" + std::string(e.what()) + ")");
    }
    ExperimentReport report;
    try {
        report.name = j.at("name").get<std::string>();
        report.n_records = j.at("n_records").get<std::size_t>();
        report.precision = j.at("precision").get<double>();
        report.recall = j.at("recall").get<double>();
        report.f1 = j.at("f1").get<double>();
        for (const auto& row : j.at("per_type_counts")) {
            TypeCounts c;
            c.gold = row.at("gold").get<std::size_t>();
            c.predicted = row.at("predicted").get<std::size_t>();
            c.correct = row.at("correct").get<std::size_t>();
            report.per_type_counts.emplace_back(row.at("type").get<std::string>(), c);
        }
        for (const auto& id : j.at("failures")) {
            report.failures.push_back(id.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": report field error (" + std::string(e.what()) + ")");
    }
    return report;
}

std::string render_report_table(const ExperimentReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    const std::size_t width = std::max<std::size_t>(report.name.size(), 10);
    out << "| " << std::left << std::setw(static_cast<int>(width)) << "Experiment"
        << " | F1     | Precision | Recall |\n";
    out << "|-" << std::string(width, '-') << "-|--------|-----------|--------|\n";
    out << "| " << std::setw(static_cast<int>(width)) << report.name << " | " << report.f1
        << " | " << std::setw(9) << report.precision << " | " << report.recall << " |\n";
    return out.str();
}

ReportDelta compare_reports(const ExperimentReport& a, const ExperimentReport& b) {
    if (a.n_records != b.n_records) {
        throw Error("compare_reports: record counts differ (" + std::to_string(a.n_records) +
                    " vs " + std::to_string(b.n_records) + ")");
    }
    std::map<std::string, TypeCounts> ca, cb;
    for (const auto& [label, c] : a.per_type_counts) ca[label] = c;
    for (const auto& [label, c] : b.per_type_counts) cb[label] = c;
    if (ca.size() != cb.size()) {
        throw Error("compare_reports: type inventories differ");
    }
    for (const auto& [label, c] : ca) {
        auto it = cb.find(label);
        if (it == cb.end() || it->second.gold != c.gold) {
            throw Error("compare_reports: gold counts differ for type '" + label +
                        "'; the reports describe different datasets");
        }
    }

    ReportDelta delta;
    delta.f1_delta = a.f1 - b.f1;
    delta.precision_delta = a.precision - b.precision;
    delta.recall_delta = a.recall - b.recall;
    for (const auto& [label, c] : ca) {
        const auto& other = cb[label];
        const auto dp = static_cast<long long>(c.predicted) -
                        static_cast<long long>(other.predicted);
        const auto dc =
            static_cast<long long>(c.correct) - static_cast<long long>(other.correct);
        if (dp != 0 || dc != 0) delta.per_type.push_back({label, dp, dc});
    }
    return delta;
}

std::string render_delta(const ReportDelta& delta) {
    std::ostringstream out;
    out << std::showpos << std::fixed << std::setprecision(4);
    out << "f1 " << delta.f1_delta << "  precision " << delta.precision_delta << "  recall "
        << delta.recall_delta << "\n";
    for (const auto& t : delta.per_type) {
        out << "  " << t.type_label << ": predicted " << t.predicted_delta << ", correct "
            << t.correct_delta << "\n";
    }
    return out.str();
}

}  // namespace semtower
