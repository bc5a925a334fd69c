#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "starrad/cli/commands.hpp"
#include "starrad/cli/config.hpp"
#include "starrad/cli/csv.hpp"
#include "starrad/cli/experiments.hpp"
#include "starrad/cli/verify.hpp"
#include "starrad/errors.hpp"

using namespace starrad;
using namespace starrad::cli;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("starrad_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Config, Quadrature) {
    const auto cfg = parse("[quadrature]\nfunction = example2\nN = 40\nk = 8\nsweep_k = 10, 20\n[output]\ndirectory = res\n");
    ASSERT_TRUE(cfg.is_quadrature());
    EXPECT_EQ(cfg.quadrature().function, "example2");
    EXPECT_EQ(cfg.quadrature().n, 40);
    EXPECT_EQ(cfg.quadrature().k, 8);
    EXPECT_EQ(cfg.quadrature().samples, 100);
    EXPECT_EQ(cfg.quadrature().sweep_k, (std::vector<int>{10, 20}));
    EXPECT_EQ(cfg.output.directory, fs::path("res"));
}

TEST(Config, BareQuadratureSectionUsesDefaults) {
    const auto cfg = parse("[quadrature]\n");
    ASSERT_TRUE(cfg.is_quadrature());
    EXPECT_EQ(cfg.quadrature().n, 25);
    EXPECT_TRUE(cfg.quadrature().sweep_k.empty());
}

TEST(Config, PinnDefaultsComeFromThePreset) {
    const auto cfg = parse("[pinn]\nproblem = brinkman\nseeds = 0, 1, 2\nepochs = 3000\n");
    ASSERT_FALSE(cfg.is_quadrature());
    const auto& p = cfg.pinn();
    EXPECT_EQ(p.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
    EXPECT_EQ(p.criteria.size(), 4u);
    EXPECT_EQ(p.base.epochs, 3000);
    EXPECT_EQ(p.base.n_collocation, 30);
    EXPECT_EQ(p.base.spec.hidden_layers, (std::vector<int>{20, 20, 20}));
}

TEST(Config, ConstantsOverride) {
    const auto cfg = parse("[pinn]\nproblem = newton\ncriteria = hessian\n[constants]\nR = 0.01\n");
    EXPECT_EQ(cfg.pinn().base.constants.at("R"), 0.01);
    EXPECT_EQ(cfg.pinn().criteria, (std::vector{sampling::CriterionKind::Hessian}));
}

TEST(Config, Rejections) {
    EXPECT_THROW(parse("[quadrature]\nfunction = example1\nM = 3\n"), ConfigError);
    EXPECT_THROW(parse("[quadrature]\n[plots]\n"), ConfigError);
    EXPECT_THROW(parse("[quadrature]\n[pinn]\nproblem = newton\n"), ConfigError);
    EXPECT_THROW(parse("[output]\ndirectory = x\n"), ConfigError);
    EXPECT_THROW(parse("[quadrature]\nN = twenty\n"), ConfigError);
    EXPECT_THROW(parse("[quadrature]\nN = 5\nk = 6\n"), ConfigError);
    EXPECT_THROW(parse("[quadrature]\nfunction = example1\n[constants]\nR = 1\n"), ConfigError);
    EXPECT_THROW(parse("[pinn]\nproblem = newton\nn_collocation = 5000\n"), ConfigError);
    EXPECT_THROW(parse("[pinn]\nproblem = newton\ncriteria = res, res\n"), ConfigError);
    EXPECT_THROW(parse("[pinn]\nepochs = 10\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/starrad.ini"), ConfigError);
}

TEST(Csv, FormatReal) {
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(1.0), "1");
    EXPECT_THROW(parse_real("1.5x"), ConfigError);
    EXPECT_THROW(parse_integer("3.0"), ConfigError);
}

TEST(Csv, RealsRoundTripBitExact) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> exponent(-300, 300), mantissa(-1, 1);
    for (int i = 0; i < 10000; ++i) {
        const double x = mantissa(rng) * std::pow(10.0, exponent(rng));
        EXPECT_EQ(parse_real(format_real(x)), x);
    }
    EXPECT_EQ(parse_real(format_real(std::numeric_limits<double>::denorm_min())),
              std::numeric_limits<double>::denorm_min());
}

TEST(Csv, TraceRoundTrip) {
    std::vector<train::TraceRow> rows{{0, 1.0 / 3.0, 2e-17, 0.0}, {100, 1e300, 0.125, 1.5}};
    std::stringstream s;
    write_csv(s, trace_table(rows));
    const auto back = trace_rows(read_csv(s));
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].epoch, rows[i].epoch);
        EXPECT_EQ(back[i].train_loss, rows[i].train_loss);
        EXPECT_EQ(back[i].l2_test_error, rows[i].l2_test_error);
        EXPECT_EQ(back[i].seconds, rows[i].seconds);
    }
}

TEST(Csv, RaggedRowsRejected) {
    std::istringstream in("a,b\n1,2\n3\n");
    EXPECT_THROW(read_csv(in), ConfigError);
}

TEST(Experiments, SweepStartsAtK) {
    const auto cases = run_quadrature_sweep("example1", {10, 20}, 0, 30);
    EXPECT_EQ(cases.size(), 21u + 11u);
    EXPECT_EQ(cases.front().n, 10);
    for (const auto& c : cases) {
        EXPECT_GE(c.n, c.k);
        EXPECT_EQ(c.reference, cases.front().reference);
    }
}

TEST(Experiments, SettlingEpoch) {
    train::TrainTrace t;
    t.rows = {{0, 1, 10, 0}, {100, 1, 1.05, 0}, {200, 1, 3, 0}, {300, 1, 1.5, 0}, {400, 1, 1, 0}};
    EXPECT_EQ(settling_epoch(t, 2.0), 300);
    EXPECT_EQ(settling_epoch(t, 5.0), 100);
}

TEST(Commands, QuadWritesPlanAndSummary) {
    QuadratureSettings s;
    s.function = "example1";
    s.n = 25;
    s.k = 11;
    OutputSettings out{scratch_dir("quad"), false};
    std::ostringstream log;
    const auto files = cmd_quad(s, out, log);
    ASSERT_EQ(files.size(), 2u);
    const auto plan = read_csv_file(out.directory / "quad_example1_N25_k11_plan.csv");
    EXPECT_EQ(plan.header, (std::vector<std::string>{"j", "lo", "hi", "M_j", "n_j"}));
    ASSERT_EQ(plan.rows.size(), 11u);
    long long total = 0;
    for (const auto& r : plan.rows) total += parse_integer(r[plan.column("n_j")]);
    EXPECT_EQ(total, 25);
    const auto summary = read_csv_file(out.directory / "quad_example1_N25_k11_summary.csv");
    ASSERT_EQ(summary.rows.size(), 1u);
    EXPECT_NEAR(parse_real(summary.rows[0][summary.column("rel_error_uniform_pct")]), 15.3, 0.2);
    EXPECT_NEAR(parse_real(summary.rows[0][summary.column("rel_error_refined_pct")]), 5.47, 1.5);

    // Same inputs, same bytes.
    const auto first = slurp(files[1]);
    cmd_quad(s, out, log);
    EXPECT_EQ(slurp(files[1]), first);
}

TEST(Commands, QuadSweepWithKEqualToN) {
    QuadratureSettings s;
    s.function = "sharkfin";
    s.n = 10;
    s.k = 10;
    s.sweep_k = {10};
    s.sweep_n_max = 10;
    OutputSettings out{scratch_dir("sweep"), true};
    std::ostringstream log;
    const auto files = cmd_quad(s, out, log);
    EXPECT_EQ(files.size(), 4u);
    const auto sweep = read_csv_file(out.directory / "quad_sharkfin_sweep.csv");
    ASSERT_EQ(sweep.rows.size(), 1u);
    EXPECT_EQ(sweep.rows[0][sweep.column("N")], "10");
    EXPECT_TRUE(std::isfinite(parse_real(sweep.rows[0][sweep.column("bound_refined")])));
    EXPECT_TRUE(fs::exists(out.directory / "plot_sharkfin_sweep.py"));
}

TEST(Commands, QuadUnknownFunction) {
    QuadratureSettings s;
    s.function = "example3";
    std::ostringstream log;
    EXPECT_THROW(cmd_quad(s, {scratch_dir("unknown"), false}, log), ConfigError);
}

TEST(Commands, PinnFileContract) {
    auto cfg = parse("[pinn]\nproblem = newton\nseeds = 4\nepochs = 200\nresample_period = 100\n"
                     "hidden_layers = 8, 8\npool_size = 200\ncheckpoints = 100\n");
    const auto dir = scratch_dir("pinn");
    std::ostringstream log;
    const auto files = cmd_pinn(cfg.pinn(), {dir, false}, log);
    EXPECT_EQ(files.size(), 5u);
    for (auto crit : {"res", "grad", "hessian", "unif"}) {
        const auto trace = trace_rows(read_csv_file(dir / (std::string("newton_") + crit + "_seed4_trace.csv")));
        EXPECT_EQ(trace.back().epoch, 200);
    }
    const auto cmp = read_csv_file(dir / "newton_comparison.csv");
    EXPECT_EQ(cmp.rows.size(), 8u);  // checkpoint + final per run
}

TEST(Commands, PinnPoissonErrorField) {
    auto cfg = parse("[pinn]\nproblem = poisson2d\ncriteria = unif\nepochs = 100\nresample_period = 100\n"
                     "hidden_layers = 4\npool_size = 500\nn_collocation = 50\n");
    const auto dir = scratch_dir("poisson");
    std::ostringstream log;
    const auto files = cmd_pinn(cfg.pinn(), {dir, false}, log);
    EXPECT_EQ(files.size(), 3u);
    const auto field = read_csv_file(dir / "poisson2d_unif_seed0_error_field.csv");
    EXPECT_EQ(field.header, (std::vector<std::string>{"x", "y", "squared_error"}));
    EXPECT_EQ(field.rows.size(), 10000u);
}

TEST(Commands, PinnValidatesBeforeTraining) {
    auto cfg = parse("[pinn]\nproblem = brinkman\nepochs = 1000\n");
    auto settings = cfg.pinn();
    settings.base.pool_size = 10;
    const auto dir = scratch_dir("invalid");
    std::ostringstream log;
    EXPECT_THROW(cmd_pinn(settings, {dir, false}, log), ConfigError);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Verify, AllChecksPass) {
    VerifyOptions opt;
    opt.random_functions = 200;
    opt.random_networks = 20;
    for (const auto& c : run_verify(opt)) EXPECT_TRUE(c.passed) << c.name << ": " << c.measured;
}

TEST(Verify, TamperedAllocationFails) {
    // Raw ceilings without the adjustment loop overshoot N.
    VerifyOptions opt;
    opt.random_functions = 200;
    opt.allocate = [](std::span<const double> m, int n) {
        double total = 0;
        for (double v : m) total += std::sqrt(v);
        std::vector<int> out;
        for (double v : m) out.push_back(std::max(1, static_cast<int>(std::ceil(n * std::sqrt(v) / total))));
        return out;
    };
    EXPECT_FALSE(check_allocation_sums(opt).passed);
}

TEST(Verify, TamperedBoundFails) {
    // Refined bound with an unsquared panel count is no longer dominated.
    VerifyOptions opt;
    opt.random_functions = 200;
    opt.bounds = [](std::span<const double> m, const quad::Interval& domain, int n) {
        auto b = quad::error_bounds(m, domain, n);
        const auto plan = quad::allocate_and_adjust(m, n);
        const double l = domain.width() / static_cast<double>(m.size());
        b.refined = 0;
        for (std::size_t j = 0; j < m.size(); ++j) b.refined += l * l * l / 12 * m[j] / plan[j];
        return b;
    };
    EXPECT_FALSE(check_bound_dominance(opt).passed);
}

TEST(Verify, ReportFormat) {
    std::ostringstream out;
    EXPECT_EQ(report_checks(out, {{"a", true, "1"}, {"b", false, "2"}}), 1);
    EXPECT_NE(out.str().find("PASS  a"), std::string::npos);
    EXPECT_NE(out.str().find("FAIL  b"), std::string::npos);
    EXPECT_NE(out.str().find("1/2 checks passed"), std::string::npos);
}

TEST(Config, ShippedConfigsLoad) {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(STARRAD_CONFIG_DIR)) {
        if (entry.path().extension() != ".ini") continue;
        EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
        ++count;
    }
    EXPECT_EQ(count, 6);
}
