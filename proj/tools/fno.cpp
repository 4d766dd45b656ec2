// fno: lift sampled paths to rough paths, verify stored lifts, generate test paths.

#include <CLI11.hpp>

#include <fno/cli.hpp>

#include <functional>
#include <iostream>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Fourier normal ordering rough path lift"};
    app.require_subcommand(1);

    // lift
    fno::RunConfig flags;
    std::string config_file;
    auto* lift = app.add_subcommand("lift", "lift a sampled path CSV to a rough path");
    std::vector<std::pair<CLI::Option*, std::function<void(fno::RunConfig&)>>> overrides;
    auto opt = [&](CLI::Option* o, std::function<void(fno::RunConfig&)> copy) { overrides.push_back({o, std::move(copy)}); };
    opt(lift->add_option("--input", flags.input, "CSV with header t,x1..xd"), [&](auto& c) { c.input = flags.input; });
    opt(lift->add_option("--alpha", flags.alpha, "Hoelder exponent in (0,1)"), [&](auto& c) { c.alpha = flags.alpha; });
    opt(lift->add_option("--levels", flags.levels, "number of levels (default floor(1/alpha))"),
        [&](auto& c) { c.levels = flags.levels; });
    opt(lift->add_option("--kmax", flags.kmax, "largest block index (default: the block holding Nyquist)"),
        [&](auto& c) { c.kmax = flags.kmax; });
    opt(lift->add_option("--grid-fine", flags.grid_fine, "expected sample count M"),
        [&](auto& c) { c.grid_fine = flags.grid_fine; });
    opt(lift->add_option("--grid-coarse", flags.grid_coarse, "coarse evaluation grid size G"),
        [&](auto& c) { c.grid_coarse = flags.grid_coarse; });
    opt(lift->add_option("--scheme", flags.scheme, "regularized | full"), [&](auto& c) { c.scheme = flags.scheme; });
    opt(lift->add_option("--partition", flags.partition, "sharp | composite"),
        [&](auto& c) { c.partition = flags.partition; });
    opt(lift->add_option("--tie-weights", flags.tie_weights, "apply tie weights (true|false)"),
        [&](auto& c) { c.tie_weights = flags.tie_weights; });
    opt(lift->add_option("--window-margin", flags.window_margin, "window margin fraction in (0,0.4)"),
        [&](auto& c) { c.window_margin = flags.window_margin; });
    opt(lift->add_option("--out", flags.out, "rough path JSON output"), [&](auto& c) { c.out = flags.out; });
    opt(lift->add_option("--report", flags.report, "report JSON output"), [&](auto& c) { c.report = flags.report; });
    opt(lift->add_option("--band-dump", flags.band_dump, "CSV dump of block spectra"),
        [&](auto& c) { c.band_dump = flags.band_dump; });
    opt(lift->add_flag("--allow-integer-inv-alpha", flags.allow_integer_inv_alpha, "nudge alpha when 1/alpha is an integer"),
        [&](auto& c) { c.allow_integer_inv_alpha = flags.allow_integer_inv_alpha; });
    opt(lift->add_flag("--verify-tail", flags.verify_tail, "also lift at kmax+2 and report the difference"),
        [&](auto& c) { c.verify_tail = flags.verify_tail; });
    opt(lift->add_option("--threads", flags.threads, "worker threads"), [&](auto& c) { c.threads = flags.threads; });
    lift->add_option("--config", config_file, "JSON config with the same keys; flags take precedence");

    // verify
    std::string verify_input, verify_report;
    auto* verify = app.add_subcommand("verify", "recompute Chen, shuffle and Hoelder checks from a rough path JSON");
    verify->add_option("--input", verify_input, "rough path JSON")->required();
    verify->add_option("--report", verify_report, "report JSON output (default: stdout)");

    // gen-path
    fno::GenConfig gen;
    auto* genp = app.add_subcommand("gen-path", "write a synthetic test path CSV");
    genp->add_option("--kind", gen.kind, "weierstrass | bandnoise | smoothpoly");
    genp->add_option("--alpha", gen.alpha, "exponent in (0,1)");
    genp->add_option("--seed", gen.seed, "random seed");
    genp->add_option("--grid-fine", gen.grid_fine, "sample count (power of two)");
    genp->add_option("--dim", gen.dim, "number of channels");
    genp->add_option("--out", gen.out, "CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : fno::kExitConfig;
    }

    if (*lift) {
        fno::RunConfig cfg;
        if (!config_file.empty()) {
            try {
                cfg = fno::load_config_file(config_file);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return fno::kExitConfig;
            }
        }
        for (auto& [o, copy] : overrides)
            if (o->count() > 0) copy(cfg);
        return fno::run_lift(cfg);
    }
    if (*verify) return fno::run_verify(verify_input, verify_report);
    return fno::run_gen_path(gen);
}
