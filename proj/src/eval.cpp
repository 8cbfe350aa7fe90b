#include "gridflow/eval.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gridflow/egbf.hpp"
#include "gridflow/lgbf.hpp"
#include "gridflow/pf.hpp"

namespace gridflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix floored_cov(const Matrix& cov, bool* floored) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    const double floor = 1e-12 * std::max(1.0, cov.trace());
    if (es.eigenvalues().minCoeff() >= floor) {
        *floored = false;
        return cov;
    }
    *floored = true;
    Vector d = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

void maybe_dump(const ExperimentConfig& cfg, const std::string& filter_id, int run, int k,
                const char* phase, const PointMassDensity& pmd) {
    if (!cfg.debug_dump || run != 0) return;
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(cfg.out_dir) / "debug";
    fs::create_directories(dir);
    std::ofstream out(dir / (filter_id + "_run0_k" + std::to_string(k) + "_" + phase + ".txt"));
    dump_pmd(pmd, out);
}

RunRecord grid_filter_run(const StateSpaceModel& model, const std::string& filter_id,
                          const ExperimentConfig& cfg, int run, const Trajectory& traj) {
    RunRecord rec;
    rec.run = run;
    const bool lagrangian = (filter_id == "lgbf");
    try {
        PointMassDensity pred = gaussian_pmd({model.initial_mean, model.initial_cov},
                                             cfg.kappa, cfg.grid_counts);
        for (int k = 0; k <= cfg.steps; ++k) {
            const auto t0 = Clock::now();
            PointMassDensity filt =
                measurement_update(pred, likelihood(model, pred.grid, traj.measurements[k]));
            const GaussianMoments mom = pmd_moments(filt);
            const double t_update = seconds_since(t0);

            maybe_dump(cfg, filter_id, run, k, "filt", filt);
            StepRecord step;
            step.x_true = traj.states[k];
            step.x_est = mom.mean;
            // reported covariance includes the within-cell second moment of
            // the piecewise-constant density; keeps the uncertainty honest
            // when the posterior concentrates on a single cell
            step.cov = mom.cov + Matrix(
                (filt.grid.spacing.array().square() / 12.0).matrix().asDiagonal());
            step.t_update = t_update;

            if (k < cfg.steps) {
                const auto t1 = Clock::now();
                if (lagrangian) {
                    pred = lgbf_predict(filt, model, cfg.kappa, cfg.grid_counts);
                } else {
                    const GaussianMoments pm = local_predict_moments(model, mom);
                    pred = egbf_predict(filt, design_grid(pm, cfg.kappa, cfg.grid_counts),
                                        model);
                }
                step.t_predict = seconds_since(t1);
                maybe_dump(cfg, filter_id, run, k + 1, "pred", pred);
            }
            rec.steps.push_back(std::move(step));
        }
    } catch (const divergence_error& e) {
        rec.diverged = true;
        rec.divergence_reason = e.what();
    }
    return rec;
}

RunRecord pf_run(const StateSpaceModel& model, const ExperimentConfig& cfg, int run,
                 const Trajectory& traj, std::uint64_t run_seed) {
    RunRecord rec;
    rec.run = run;
    try {
        ParticleSet ps = pf_init(model, cfg.effective_particles(), run_seed);
        for (int k = 0; k <= cfg.steps; ++k) {
            const auto t0 = Clock::now();
            pf_weight(ps, traj.measurements[k], model);
            const GaussianMoments mom = weighted_moments(ps);
            pf_resample(ps);
            const double t_update = seconds_since(t0);

            StepRecord step;
            step.x_true = traj.states[k];
            step.x_est = mom.mean;
            step.cov = mom.cov;
            step.t_update = t_update;
            if (k < cfg.steps) {
                const auto t1 = Clock::now();
                pf_propagate(ps, model);
                step.t_predict = seconds_since(t1);
            }
            rec.steps.push_back(std::move(step));
        }
    } catch (const divergence_error& e) {
        rec.diverged = true;
        rec.divergence_reason = e.what();
    }
    return rec;
}

}  // namespace

double rmse(const std::vector<RunRecord>& records) {
    double acc = 0.0;
    std::size_t terms = 0;
    for (const RunRecord& rec : records) {
        if (rec.diverged) continue;
        for (const StepRecord& s : rec.steps) {
            acc += (s.x_est - s.x_true).squaredNorm();
            terms += static_cast<std::size_t>(s.x_true.size());
        }
    }
    if (terms == 0) throw std::invalid_argument("rmse: no usable records");
    return std::sqrt(acc / static_cast<double>(terms));
}

double anees(const std::vector<RunRecord>& records, int* floor_warnings) {
    double acc = 0.0;
    std::size_t terms = 0;
    int warnings = 0;
    for (const RunRecord& rec : records) {
        if (rec.diverged) continue;
        for (const StepRecord& s : rec.steps) {
            bool floored = false;
            const Matrix c = floored_cov(s.cov, &floored);
            if (floored) ++warnings;
            const Vector e = s.x_est - s.x_true;
            acc += e.dot(c.llt().solve(e));
            terms += static_cast<std::size_t>(e.size());
        }
    }
    if (terms == 0) throw std::invalid_argument("anees: no usable records");
    if (floor_warnings) *floor_warnings = warnings;
    return acc / static_cast<double>(terms);
}

MetricsSummary summarize(const std::vector<RunRecord>& records) {
    MetricsSummary s;
    s.rmse = rmse(records);
    s.anees = anees(records, &s.anees_floor_warnings);

    double t_pred = 0.0, t_upd = 0.0;
    std::size_t n_pred = 0, n_upd = 0;
    std::size_t max_steps = 0;
    for (const RunRecord& rec : records) {
        if (rec.diverged) {
            ++s.diverged_runs;
            continue;
        }
        max_steps = std::max(max_steps, rec.steps.size());
        for (std::size_t k = 0; k < rec.steps.size(); ++k) {
            t_upd += rec.steps[k].t_update;
            ++n_upd;
            if (k + 1 < rec.steps.size()) {
                t_pred += rec.steps[k].t_predict;
                ++n_pred;
            }
        }
    }
    s.mean_predict_time = n_pred ? t_pred / n_pred : 0.0;
    s.mean_update_time = n_upd ? t_upd / n_upd : 0.0;

    s.per_step_rmse.assign(max_steps, 0.0);
    std::vector<std::size_t> counts(max_steps, 0);
    for (const RunRecord& rec : records) {
        if (rec.diverged) continue;
        for (std::size_t k = 0; k < rec.steps.size(); ++k) {
            s.per_step_rmse[k] += (rec.steps[k].x_est - rec.steps[k].x_true).squaredNorm();
            counts[k] += static_cast<std::size_t>(rec.steps[k].x_true.size());
        }
    }
    for (std::size_t k = 0; k < max_steps; ++k)
        s.per_step_rmse[k] = counts[k] ? std::sqrt(s.per_step_rmse[k] / counts[k]) : 0.0;
    return s;
}

ExperimentResult run_experiment(const StateSpaceModel& model, const std::string& filter_id,
                                const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.records.reserve(cfg.mc_runs);
    for (int run = 0; run < cfg.mc_runs; ++run) {
        const std::uint64_t run_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(run));
        const Trajectory traj = simulate_trajectory(model, std::max(cfg.steps, 1), run_seed);
        if (filter_id == "pf")
            result.records.push_back(pf_run(model, cfg, run, traj, run_seed));
        else
            result.records.push_back(grid_filter_run(model, filter_id, cfg, run, traj));
    }
    result.summary = summarize(result.records);
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& filter_id) {
    return run_experiment(make_model(cfg.model_id, cfg.model_params), filter_id, cfg);
}

}  // namespace gridflow
