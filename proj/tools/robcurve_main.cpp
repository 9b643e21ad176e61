#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "robcurve/cli.hpp"

namespace {

std::string config_path;

void add_common_options(CLI::App* cmd, robcurve::RunConfig& cfg) {
    cmd->add_option("--config", config_path, "flat key=value configuration file");
    cmd->add_option("--system", cfg.system, "feedback_A | feedback_B");
    cmd->add_option("-a,--a", cfg.a, "largest uncertainty radius");
    cmd->add_option("--lambda", cfg.lambda, "relative width of the radius range");
    cmd->add_option("--scheme", cfg.scheme, "uniform | geometric | explicit");
    cmd->add_option("--radii", cfg.radii, "explicit radii (ascending)");
    cmd->add_option("--eps", cfg.eps, "interpolation tolerance for sizing");
    cmd->add_option("-m,--m", cfg.m, "grid size (0: derive from eps)");
    cmd->add_option("-N,--samples", cfg.N, "per-radius sample size");
    cmd->add_option("--delta", cfg.delta, "band confidence parameter");
    cmd->add_option("-d,--dimension", cfg.d, "uncertainty dimension (0: from system)");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--engine", cfg.engine, "reuse | conventional | both");
    cmd->add_option("--max-m", cfg.max_m, "largest grid the run/plan may materialize");
    cmd->add_option("--max-draws", cfg.max_draws, "largest admissible simulation budget");
    cmd->add_option("--engp-terms-cap", cfg.engp_terms_cap,
                    "largest term count for exact uniform-scheme engp sums");
    cmd->add_flag("--audit", cfg.audit, "record and dump the per-draw audit log");
    cmd->add_option("--repeats", cfg.repeats, "seed-parallel repeated runs");
    cmd->add_option("--workers", cfg.workers, "worker threads for repeated runs");
    cmd->add_option("--band", cfg.band, "band pairing: consistent | literal");
    cmd->add_option("-o,--out-dir", cfg.out_dir, "output directory");
    cmd->add_option("--eps-min", cfg.eps_min, "compare sweep: smallest tolerance");
    cmd->add_option("--eps-max", cfg.eps_max, "compare sweep: largest tolerance");
    cmd->add_option("--eps-steps", cfg.eps_steps, "compare sweep: number of points");
}

// Flat key=value file; keys are the long option names without the leading
// dashes. Values already given on the command line win.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw robcurve::input_error("cannot read config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw robcurve::input_error("config line is not key=value: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw robcurve::input_error("unknown config key: " + key);
        if (op->count() > 0) continue; // command line takes precedence
        std::istringstream parts(value);
        std::string token;
        while (parts >> token) op->add_result(token);
        op->run_callback();
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robustness-curve estimation with sample reuse"};
    app.require_subcommand(1);

    robcurve::RunConfig cfg;
    CLI::App* plan = app.add_subcommand("plan", "grid sizing and cost planning");
    CLI::App* run = app.add_subcommand("run", "estimate a robustness curve");
    CLI::App* compare = app.add_subcommand("compare", "sweep tolerances across schemes");
    CLI::App* demo = app.add_subcommand("demo", "two-controller example with overlays");
    for (CLI::App* cmd : {plan, run, compare, demo}) add_common_options(cmd, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = plan->parsed()      ? plan
                           : run->parsed()     ? run
                           : compare->parsed() ? compare
                                               : demo;
        if (!config_path.empty()) apply_config_file(active, config_path);
        if (plan->parsed()) return robcurve::cmd_plan(cfg, std::cout);
        if (run->parsed()) return robcurve::cmd_run(cfg, std::cout);
        if (compare->parsed()) return robcurve::cmd_compare(cfg, std::cout);
        if (demo->parsed()) return robcurve::cmd_demo(cfg, std::cout);
    } catch (const CLI::Error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const robcurve::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const robcurve::cap_exceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const robcurve::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const robcurve::internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
