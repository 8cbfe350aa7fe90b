#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <vector>

#include "gridflow/eval.hpp"
#include "gridflow/output.hpp"

namespace {

constexpr const char* kUsage = R"(gridflow - grid-based and particle filter benchmark

usage: gridflow [flags]
  --model <id>        henon | ct5d | linear1d (default henon)
  --filter <list>     comma list of lgbf,egbf,pf (default lgbf)
  --grid <list>       odd point counts per dimension (default model-specific)
  --particles <n>     particle count for pf (default: grid point total)
  --kappa <k>         grid half-width in std deviations, in [1,10] (default 5)
  --mc-runs <n>       Monte-Carlo runs (default 100)
  --steps <n>         time steps per run (default 10)
  --seed <n>          master seed (default 1)
  --out <dir>         output directory (default $GRIDFLOW_OUT or .)
  --config <file>     flat key=value config file; flags override it
  --set <key=value>   override any config key, e.g. --set model.a=1.4
  --debug-dump        dump per-step point-mass densities for run 0
)";

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (const std::string& a : args) {
        if (a == "-h" || a == "--help") {
            std::fputs(kUsage, stdout);
            return 0;
        }
    }

    try {
        const gridflow::ExperimentConfig cfg = gridflow::parse_config(args);
        std::map<std::string, gridflow::ExperimentResult> results;
        int diverged = 0;
        for (const std::string& filter_id : cfg.filters) {
            std::printf("running %s on %s (%d runs, %d steps)...\n", filter_id.c_str(),
                        cfg.model_id.c_str(), cfg.mc_runs, cfg.steps);
            gridflow::ExperimentResult res = gridflow::run_experiment(cfg, filter_id);
            std::printf("  rmse=%.4g anees=%.4g predict=%.3gs update=%.3gs diverged=%d\n",
                        res.summary.rmse, res.summary.anees, res.summary.mean_predict_time,
                        res.summary.mean_update_time, res.summary.diverged_runs);
            diverged += res.summary.diverged_runs;
            results.emplace(filter_id, std::move(res));
        }
        for (const std::string& path : gridflow::emit_outputs(results, cfg))
            std::printf("wrote %s\n", path.c_str());
        return diverged == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
