// ptint: singular radial solutions with a point interaction.
//   ptint <spectrum|solve|branch-scan|crosscheck|probe-geometry|verify> [options]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "commands.hpp"

namespace {

// flags that mirror config keys; --set section.key=value reaches everything else
struct Overrides {
    std::string config_path;
    std::vector<std::string> sets;
    std::string d, sigma, p, lambda, alpha, mode, k, q, seed, out;
    bool linear = false;
};

void add_common(CLI::App* sub, Overrides& o)
{
    sub->add_option("-c,--config", o.config_path, "run config file ([section] key = value)");
    sub->add_option("--set", o.sets, "override, section.key=value (repeatable)");
    sub->add_option("--d", o.d, "dimension (2 or 3)");
    sub->add_option("--sigma", o.sigma, "+1 source, -1 absorption");
    sub->add_option("--p", o.p, "nonlinearity exponent");
    sub->add_option("--lambda", o.lambda, "frequency");
    sub->add_option("--alpha", o.alpha, "extension parameter or 'free'");
    sub->add_flag("--linear", o.linear, "drop the nonlinearity (Green-function test mode)");
    sub->add_option("-o,--out", o.out, "output directory");
}

ptint::io::RunConfig resolve(const Overrides& o)
{
    using ptint::io::ConfigText;
    ConfigText text;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ptint::io::ConfigError("cannot open " + o.config_path, 0);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ConfigText::parse(ss.str());
    }
    auto put = [&](const std::string& section, const std::string& key, const std::string& v) {
        if (v.empty()) return;
        text.sections[section][key] = v;
        text.lines[section].erase(key);
    };
    for (const auto& s : o.sets) {
        const auto dot = s.find('.');
        const auto eq = s.find('=');
        if (dot == std::string::npos || eq == std::string::npos || dot > eq)
            throw ptint::io::ConfigError("--set expects section.key=value, got '" + s + "'", 0);
        put(s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
    put("params", "d", o.d);
    put("params", "sigma", o.sigma);
    put("params", "p", o.p);
    put("params", "lambda", o.lambda);
    put("params", "alpha", o.alpha);
    if (o.linear) put("params", "nonlinear", "false");
    put("run", "mode", o.mode);
    put("run", "k", o.k);
    put("run", "q", o.q);
    put("run", "seed", o.seed);
    put("run", "output", o.out);
    return ptint::io::RunConfig::from_text(text);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Singular radial solutions of (-Delta_alpha + lambda) u = sigma |u|^{p-1} u"};
    app.require_subcommand(1);
    Overrides o;
    std::string profile;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto* spectrum = app.add_subcommand("spectrum", "beta_alpha(lambda), lambda_alpha and eigenfunction norms");
    auto* solve = app.add_subcommand("solve", "ground state, nodal solution (k zeros) or fixed-charge solution");
    auto* scan = app.add_subcommand("branch-scan", "zero_count = k branch over a geometric q grid");
    auto* cross = app.add_subcommand("crosscheck", "shooting against the variational minimizer");
    auto* probe = app.add_subcommand("probe-geometry", "mountain-pass geometry along seeded random directions");
    auto* verify = app.add_subcommand("verify", "equivalence report for a profile CSV (default: linear Green function)");
    for (auto* sub : {spectrum, solve, scan, cross, probe, verify}) add_common(sub, o);
    solve->add_option("--mode", o.mode, "ground | nodal | fixed-q");
    for (auto* sub : {solve, scan}) sub->add_option("--k", o.k, "zero count");
    solve->add_option("--q", o.q, "charge (fixed-q mode)");
    scan->add_option("-j,--workers", workers, "parallel workers");
    probe->add_option("--seed", o.seed, "direction seed");
    verify->add_option("--profile", profile, "CSV with columns r,u,du,f");

    CLI11_PARSE(app, argc, argv);

    try {
        const ptint::io::RunConfig cfg = resolve(o);
        if (*spectrum) return ptint::cli::cmd_spectrum(cfg);
        if (*solve) return ptint::cli::cmd_solve(cfg);
        if (*scan) return ptint::cli::cmd_branch_scan(cfg, workers);
        if (*cross) return ptint::cli::cmd_crosscheck(cfg);
        if (*probe) return ptint::cli::cmd_probe_geometry(cfg);
        if (*verify) return ptint::cli::cmd_verify(cfg, profile);
    } catch (const ptint::io::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
