#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "suge/pipeline.hpp"

namespace suge {

inline constexpr int kRunReportSchemaVersion = 1;

/// RunReport as pretty-printed JSON (schema in docs/formats.md). Per-sample
/// history is not included; it goes to the confidence CSVs.
std::string run_report_to_json(const RunReport& report);

/// Header: sample_id,tuple_md,triple_md,label_confidence,image_confidence,weight
std::string confidence_csv(const ConfidenceSnapshot& snapshot);
std::string confidence_csv_name(const ConfidenceSnapshot& snapshot);  ///< e.g. epoch_010_net1.csv

/// Fields of a run report that the comparison table needs.
struct RunSummary {
    std::string name;
    std::string mode;
    std::string ablations;  ///< '+'-joined active ablation flags, "none" if empty
    std::optional<double> test_error;  ///< final ensemble error
    std::optional<double> label_auc, label_precision, label_recall;
    std::optional<double> image_auc, image_precision, image_recall;
};

/// Reads the summary out of report JSON text; throws ParseError.
RunSummary summarize_run_report(const std::string& json_text, const std::string& name);

struct ComparisonTable {
    std::vector<RunSummary> rows;
    std::optional<double> baseline_error;  ///< from the first baseline-mode run
};

ComparisonTable make_comparison(std::vector<RunSummary> rows);
std::string comparison_text(const ComparisonTable& table);
std::string comparison_csv(const ComparisonTable& table);

/// Schema checks used by the CLI self-check flag. Each throws ParseError.
void validate_run_report_json(const std::string& json_text);
void validate_confidence_csv(const std::string& csv_text, std::size_t expected_rows);

}  // namespace suge
