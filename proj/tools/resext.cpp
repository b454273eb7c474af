// resext: command-line front end. Flags are shared by all subcommands; each
// subcommand reads the ones it needs.

#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

void write_atomically(const std::string& path, const std::string& text)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw resext::PreconditionError("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw resext::PreconditionError("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

} // namespace

int main(int argc, char** argv)
{
    using resext::cli::RunConfig;
    RunConfig cfg;
    bool json_flag = false;

    CLI::App app{"Residue functions and extension estimates on toric model data"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--config", cfg.config_path, "JSON file with c, nu, m and optional smooth_term")
        ->check(CLI::ExistingFile);
    app.add_option("--preset", cfg.preset, "named configuration")
        ->check(CLI::IsMember(resext::preset_names()));
    app.add_option("--c", cfg.c, "comma-separated c_j, e.g. 1/2,0");
    app.add_option("--nu", cfg.nu, "comma-separated nu_j");
    app.add_option("--m", cfg.m, "multiplier m");
    app.add_option("--smooth", cfg.smooth, "smooth term, e.g. '1,0=1/10;0,1=-1/5'");
    app.add_option("--sigma", cfg.sigma, "sigma (residue order / extension stage)");
    app.add_option("--ell", cfg.ell, "ell > 1, e.g. e or 10");
    app.add_option("--ells", cfg.ells, "ell list for the ell-independence suite");
    app.add_option("--eps-grid", cfg.eps_grid, "eps grid a:b, halving from a down to b");
    app.add_option("--tol", cfg.tol, "relative quadrature tolerance");
    app.add_option("--identity-tol", cfg.identity_tol, "relative tolerance for identity checks");
    app.add_option("--seed", cfg.seed, "Monte Carlo seed");
    app.add_flag("--json", json_flag, "emit JSON (the default)");
    app.add_flag("--csv", cfg.csv, "emit the flat table instead of JSON");
    app.add_option("--out", cfg.out, "write the report to this path");
    app.add_flag("-v,--verbose", cfg.verbosity, "print a one-line summary to stderr");
    app.add_option("--range", cfg.range, "jump range lo:hi");
    app.add_option("--f", cfg.f, "section, e.g. 1+z1");
    app.add_option("--shells", cfg.shells, "shell levels start:end:step");
    app.add_option("--box", cfg.box, "membership box size per coordinate");
    app.add_option("--configs", cfg.configs, "number of random configurations");

    for (const char* name : {"jumps", "ideals", "centres", "residue", "ohsawa", "extend"}) {
        app.add_subcommand(name)->fallthrough();
    }
    auto* verify = app.add_subcommand("verify", "run a named verification suite")->fallthrough();
    verify->add_option("suite", cfg.suite, "suite name")
        ->required()
        ->check(CLI::IsMember(resext::cli::suite_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (json_flag && cfg.csv) {
        std::cerr << "error: --json and --csv are exclusive\n";
        return 2;
    }

    try {
        const auto out = resext::cli::run_command(cfg);
        const std::string text = resext::cli::render(out, cfg.csv);
        if (cfg.out.empty()) {
            std::cout << text;
        } else {
            write_atomically(cfg.out, text);
        }
        if (cfg.verbosity > 0) {
            std::cerr << cfg.command << ": " << (out.exit_code == 0 ? "ok" : "verification failed") << "\n";
        }
        return out.exit_code;
    } catch (const resext::PreconditionError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const resext::PositivityError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
