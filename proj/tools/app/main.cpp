#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "starrad/cli/commands.hpp"
#include "starrad/cli/config.hpp"
#include "starrad/cli/runtime.hpp"
#include "starrad/cli/verify.hpp"
#include "starrad/errors.hpp"

int main(int argc, char** argv) {
    using namespace starrad;
    cli::tune_allocator();

    CLI::App app{"Adaptive trapezoid quadrature and residual-driven PINN resampling"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seeds, criteria;

    auto* quad = app.add_subcommand("quad", "uniform vs refined trapezoid rule");
    quad->add_option("--config", config_path, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    quad->add_option("--out", out_dir, "output directory (overrides [output] directory)");

    auto* pinn = app.add_subcommand("pinn", "train PINNs under each sampling criterion");
    pinn->add_option("--config", config_path, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    pinn->add_option("--out", out_dir, "output directory (overrides [output] directory)");
    pinn->add_option("--seeds", seeds, "comma-separated seeds, e.g. 0,1,2");
    pinn->add_option("--criteria", criteria, "comma-separated subset of res,grad,hessian,unif");

    auto* verify = app.add_subcommand("verify", "run the property battery and golden cases");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cli::report_checks(std::cout, cli::run_verify());

        auto config = cli::load_config(config_path);
        if (!out_dir.empty()) config.output.directory = out_dir;

        cli::FileList files;
        if (quad->parsed()) {
            if (!config.is_quadrature()) throw ConfigError("`quad` needs a config with a [quadrature] section");
            files = cli::cmd_quad(config.quadrature(), config.output, std::cerr);
        } else {
            if (config.is_quadrature()) throw ConfigError("`pinn` needs a config with a [pinn] section");
            auto& settings = config.pinn();
            if (!seeds.empty()) settings.seeds = cli::parse_seed_list(seeds);
            if (!criteria.empty()) settings.criteria = cli::parse_criterion_list(criteria);
            files = cli::cmd_pinn(settings, config.output, std::cerr);
        }
        for (const auto& f : files) std::cout << f.string() << '\n';
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
