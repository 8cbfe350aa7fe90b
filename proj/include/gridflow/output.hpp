#pragma once

#include <map>
#include <string>

#include "gridflow/eval.hpp"

namespace gridflow {

/// Writes, per filter, a summary JSON and a records CSV, plus a combined
/// human-readable metrics table and a run-0 trajectory CSV for plotting.
/// Returns the list of paths written. I/O failures carry the path.
std::vector<std::string> emit_outputs(
    const std::map<std::string, ExperimentResult>& results_by_filter,
    const ExperimentConfig& cfg);

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path);
void write_summary_json(const MetricsSummary& summary, const ExperimentConfig& cfg,
                        const std::string& filter_id, const std::string& path);

}  // namespace gridflow
