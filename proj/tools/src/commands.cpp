#include "starrad/cli/commands.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <string>

#include "starrad/cli/csv.hpp"
#include "starrad/cli/experiments.hpp"
#include "starrad/errors.hpp"
#include "starrad/integrands.hpp"

namespace starrad::cli {

namespace {

std::string str(int v) { return std::to_string(v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
}

std::string sweep_plot_script(const std::string& csv_name, const std::string& function) {
    return "import sys\n"
           "import matplotlib\n"
           "matplotlib.use('Agg')\n"
           "import matplotlib.pyplot as plt\n"
           "import pandas as pd\n\n"
           "df = pd.read_csv('" + csv_name + "')\n"
           "fig, ax = plt.subplots(figsize=(7, 4.5))\n"
           "for k, g in df.groupby('k'):\n"
           "    ax.semilogy(g['N'], g['rel_error_refined_pct'], label=f'refined k={k}')\n"
           "first = df[df['k'] == df['k'].min()]\n"
           "ax.semilogy(first['N'], first['rel_error_uniform_pct'], 'k--', label='uniform')\n"
           "ax.set_xlabel('N')\n"
           "ax.set_ylabel('relative error [%]')\n"
           "ax.set_title('" + function + "')\n"
           "ax.legend()\n"
           "fig.tight_layout()\n"
           "fig.savefig(sys.argv[1] if len(sys.argv) > 1 else '" + function + "_sweep.png', dpi=150)\n";
}

std::string pinn_plot_script(const std::string& csv_name, const std::string& problem, bool field) {
    std::string s = "import glob\n"
                    "import sys\n"
                    "import matplotlib\n"
                    "matplotlib.use('Agg')\n"
                    "import matplotlib.pyplot as plt\n"
                    "import pandas as pd\n\n"
                    "df = pd.read_csv('" + csv_name + "')\n"
                    "fig, ax = plt.subplots(figsize=(7, 4.5))\n"
                    "for crit, g in df.groupby('criterion'):\n"
                    "    m = g.groupby('epoch')['l2_test_error'].median()\n"
                    "    ax.semilogy(m.index, m.values, label=f'{crit}-RAD')\n"
                    "ax.set_xlabel('epoch')\n"
                    "ax.set_ylabel('L2 test error (median over seeds)')\n"
                    "ax.set_title('" + problem + "')\n"
                    "ax.legend()\n"
                    "fig.tight_layout()\n"
                    "fig.savefig('" + problem + "_l2.png', dpi=150)\n";
    if (field) {
        s += "\nfor path in sorted(glob.glob('" + problem + "_*_error_field.csv')):\n"
             "    f = pd.read_csv(path).pivot(index='y', columns='x', values='squared_error')\n"
             "    fig, ax = plt.subplots(figsize=(5, 4))\n"
             "    im = ax.imshow(f.values, origin='lower', extent=(0, 1, 0, 1), cmap='viridis')\n"
             "    fig.colorbar(im, ax=ax)\n"
             "    ax.set_title(path)\n"
             "    fig.savefig(path.replace('.csv', '.png'), dpi=150)\n";
    }
    return s;
}

}  // namespace

FileList cmd_quad(const QuadratureSettings& settings, const OutputSettings& output, std::ostream& log) {
    FileList files;
    const auto& dir = output.directory;
    const auto c = run_quadrature_case(settings.function, settings.n, settings.k, settings.samples);
    const std::string stem = "quad_" + c.function + "_N" + str(c.n) + "_k" + str(c.k);

    CsvTable plan{{"j", "lo", "hi", "M_j", "n_j"}, {}};
    const auto& iv = integrands::bench_function(c.function).domain;
    for (int j = 0; j < c.plan.intervals(); ++j) {
        const auto part = iv.part(j, c.plan.intervals());
        plan.rows.push_back({str(j), format_real(part.lo()), format_real(part.hi()),
                             format_real(c.plan.maxima[static_cast<std::size_t>(j)]),
                             str(c.plan.counts[static_cast<std::size_t>(j)])});
    }
    files.push_back(dir / (stem + "_plan.csv"));
    write_csv_file(files.back(), plan);

    CsvTable summary{{"function", "N", "k", "S", "reference", "estimate_uniform", "estimate_refined",
                      "rel_error_uniform_pct", "rel_error_refined_pct", "bound_uniform", "bound_refined"},
                     {}};
    summary.rows.push_back({c.function, str(c.n), str(c.k), str(c.samples), format_real(c.reference),
                            format_real(c.uniform_estimate), format_real(c.refined_estimate),
                            format_real(c.uniform_error), format_real(c.refined_error),
                            format_real(c.bounds.uniform), format_real(c.bounds.refined)});
    files.push_back(dir / (stem + "_summary.csv"));
    write_csv_file(files.back(), summary);
    log << c.function << " N=" << c.n << " k=" << c.k << ": uniform " << c.uniform_error << "%, refined "
        << c.refined_error << "%\n";

    if (!settings.sweep_k.empty()) {
        const auto rows = run_quadrature_sweep(settings.function, settings.sweep_k, settings.sweep_n_min,
                                               settings.sweep_n_max, settings.samples);
        CsvTable sweep{{"function", "k", "N", "rel_error_uniform_pct", "rel_error_refined_pct",
                        "bound_uniform", "bound_refined"},
                       {}};
        for (const auto& r : rows)
            sweep.rows.push_back({r.function, str(r.k), str(r.n), format_real(r.uniform_error),
                                  format_real(r.refined_error), format_real(r.bounds.uniform),
                                  format_real(r.bounds.refined)});
        const std::string name = "quad_" + c.function + "_sweep.csv";
        files.push_back(dir / name);
        write_csv_file(files.back(), sweep);
        log << "sweep: " << rows.size() << " (N, k) pairs\n";
        if (output.emit_plots) {
            files.push_back(dir / ("plot_" + c.function + "_sweep.py"));
            write_text(files.back(), sweep_plot_script(name, c.function));
        }
    }
    return files;
}

FileList cmd_pinn(const PinnSettings& settings, const OutputSettings& output, std::ostream& log) {
    std::vector<train::TrainConfig> configs;
    for (auto kind : settings.criteria) {
        for (auto seed : settings.seeds) {
            auto cfg = settings.base;
            cfg.criterion = kind;
            cfg.seed = seed;
            cfg.validate();
            configs.push_back(std::move(cfg));
        }
    }
    pde::make_problem(settings.base.problem, settings.base.constants);
    log << "training " << configs.size() << " runs of " << settings.base.problem << "\n";

    const auto traces = run_trainings(configs, settings.threads);

    FileList files;
    const auto& dir = output.directory;
    const auto& problem_name = settings.base.problem;
    const std::set<int> checkpoints(settings.checkpoints.begin(), settings.checkpoints.end());
    CsvTable comparison{{"criterion", "seed", "epoch", "train_loss", "l2_test_error", "final", "failed_epoch"}, {}};

    for (std::size_t r = 0; r < configs.size(); ++r) {
        const auto& cfg = configs[r];
        const auto& trace = traces[r];
        const std::string crit(sampling::to_string(cfg.criterion));
        const std::string run = problem_name + "_" + crit + "_seed" + std::to_string(cfg.seed);

        files.push_back(dir / (run + "_trace.csv"));
        write_csv_file(files.back(), trace_table(trace.rows));

        const std::string failed = trace.ok() ? "" : str(*trace.failed_epoch);
        for (std::size_t i = 0; i < trace.rows.size(); ++i) {
            const auto& row = trace.rows[i];
            const bool last = i + 1 == trace.rows.size();
            if (!checkpoints.empty() && !checkpoints.contains(row.epoch) && !last) continue;
            comparison.rows.push_back({crit, std::to_string(cfg.seed), str(row.epoch), format_real(row.train_loss),
                                       format_real(row.l2_test_error), last ? "1" : "0", failed});
        }
        if (!trace.ok()) log << run << ": stopped at epoch " << failed << ": " << trace.failure << "\n";
        if (!trace.rows.empty())
            log << run << ": final l2 " << trace.rows.back().l2_test_error << "\n";

        if (cfg.problem == "poisson2d") {
            const auto problem = pde::make_problem(cfg.problem, cfg.constants);
            const auto grid = train::test_grid(problem);
            const auto field = train::squared_error_field(problem, trace.final_params, cfg.spec);
            CsvTable table{{"x", "y", "squared_error"}, {}};
            for (Eigen::Index j = 0; j < grid.cols(); ++j)
                table.rows.push_back({format_real(grid(0, j)), format_real(grid(1, j)), format_real(field(j))});
            files.push_back(dir / (run + "_error_field.csv"));
            write_csv_file(files.back(), table);
        }
    }

    const std::string name = problem_name + "_comparison.csv";
    files.push_back(dir / name);
    write_csv_file(files.back(), comparison);
    if (output.emit_plots) {
        files.push_back(dir / ("plot_" + problem_name + ".py"));
        write_text(files.back(), pinn_plot_script(name, problem_name, problem_name == "poisson2d"));
    }
    return files;
}

}  // namespace starrad::cli
