#pragma once

#include "gridflow/config.hpp"
#include "gridflow/model.hpp"
#include "gridflow/pmd.hpp"

namespace gridflow {

struct StepRecord {
    Vector x_true;
    Vector x_est;
    Matrix cov;
    double t_predict = 0.0;  // seconds, prediction from this step to the next
    double t_update = 0.0;   // seconds, measurement update at this step
};

struct RunRecord {
    int run = 0;
    bool diverged = false;
    std::string divergence_reason;
    std::vector<StepRecord> steps;
};

struct MetricsSummary {
    double rmse = 0.0;
    double anees = 0.0;
    double mean_predict_time = 0.0;
    double mean_update_time = 0.0;
    std::vector<double> per_step_rmse;
    int diverged_runs = 0;
    int anees_floor_warnings = 0;
};

/// sqrt of the mean squared estimation error over runs, steps, and state
/// components; diverged runs are excluded.
double rmse(const std::vector<RunRecord>& records);

/// mean of e^T C^{-1} e / n_x over runs and steps; singular covariances are
/// eigenvalue-floored first, counted in *floor_warnings.
double anees(const std::vector<RunRecord>& records, int* floor_warnings = nullptr);

struct ExperimentResult {
    MetricsSummary summary;
    std::vector<RunRecord> records;
};

/// Monte-Carlo protocol: per run, simulate a trajectory with a run-indexed
/// seed, alternate measurement update at k and prediction to k+1 for the
/// selected filter, and aggregate metrics. Diverged runs are flagged and
/// excluded, never silently dropped.
ExperimentResult run_experiment(const StateSpaceModel& model, const std::string& filter_id,
                                const ExperimentConfig& cfg);

/// Convenience overload resolving the model from cfg.model_id.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& filter_id);

MetricsSummary summarize(const std::vector<RunRecord>& records);

}  // namespace gridflow
