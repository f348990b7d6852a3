// Command-line front end: solve | sweep | verify | gen, all driven by the
// flat "key = value" config format documented in the README.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <gcbg/gcbg.hpp>

namespace {

int load_config(const std::string& path, const std::string& out_override, gcbg::RunConfig& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "config: cannot open '" << path << "'\n";
        return gcbg::kExitConfig;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        out = gcbg::parse_config(buffer.str());
    } catch (const gcbg::Error& e) {
        std::cerr << "config: " << e.what() << '\n';
        return gcbg::kExitConfig;
    }
    if (!out_override.empty()) out.output_path = out_override;
    return gcbg::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-form equilibrium solver for generalized Blotto games"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    double step = 0.0;
    std::size_t workers = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file, one 'key = value' per line")
            ->required();
        cmd->add_option("--out", out_path,
                        "output path (default: the config's output_path, then stdout)");
    };

    CLI::App* solve = app.add_subcommand("solve", "compute one pure-strategy equilibrium");
    add_common(solve);
    CLI::App* sweep = app.add_subcommand("sweep", "solve across an evenly spaced D or k sweep");
    add_common(sweep);
    sweep->add_option("--workers", workers, "parallel sweep evaluators (default 1)");
    CLI::App* verify = app.add_subcommand("verify", "certify a solution with the grid oracle");
    add_common(verify);
    verify->add_option("--step", step, "oracle grid step (default R^a / 200)")
        ->check(CLI::PositiveNumber);
    CLI::App* gen = app.add_subcommand("gen", "expand a seeded config into explicit valuations");
    add_common(gen);

    CLI11_PARSE(app, argc, argv);

    gcbg::RunConfig config;
    if (const int rc = load_config(config_path, out_path, config); rc != gcbg::kExitOk) return rc;

    if (solve->parsed()) return gcbg::run_solve(config);
    if (sweep->parsed()) return gcbg::run_sweep(config, workers);
    if (verify->parsed()) return gcbg::run_verify(config, step);
    return gcbg::run_gen(config);
}
