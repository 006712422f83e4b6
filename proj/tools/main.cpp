#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace chebrb::cli;

namespace {

void add_oracle_flags(CLI::App* cmd, OracleConfig& o) {
    cmd->add_option("--model", o.model, "Pricing model")
        ->check(CLI::IsMember({"ngarch", "heston", "lognormal"}))
        ->capture_default_str();
    cmd->add_option("--vars", o.vars, "Comma list of varied variables (default: all)");
    cmd->add_option("--set", o.sets, "Pin a variable, name=value (repeatable)");
    cmd->add_option("--bounds", o.bounds, "min:max per varied variable, comma separated");
    cmd->add_option("--degrees", o.degrees, "One degree, or one per varied variable")->capture_default_str();
    cmd->add_option("--paths", o.paths, "Monte Carlo paths per price")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Base seed")->capture_default_str();
    cmd->add_flag("!--no-antithetic", o.antithetic, "Disable antithetic pairs");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chebyshev interpolation and reduced-basis compression of option pricers"};
    app.require_subcommand(1);

    BuildConfig build;
    auto* b = app.add_subcommand("build", "Interpolate a pricing model on a Chebyshev grid");
    add_oracle_flags(b, build.oracle);
    b->add_flag("--split", build.split, "Write split form (required above the size threshold)");
    b->add_option("--split-axis", build.split_axis, "Axis to split along")->capture_default_str();
    b->add_option("--split-threshold", build.split_threshold, "Largest full tensor in bytes")
        ->capture_default_str();
    b->add_option("--out", build.out, "Output container")->required();

    CompressConfig compress;
    auto* c = app.add_subcommand("compress", "Hierarchical reduced-basis compression");
    c->add_option("input", compress.in, "Kind-0 container")->required()->check(CLI::ExistingFile);
    c->add_option("--epsilon", compress.epsilon, "MSE budget on the interpolation nodes")->capture_default_str();
    c->add_flag("--allow-floor", compress.allow_floor, "Keep everything when epsilon is below round-off");
    c->add_option("--out", compress.out, "Output container")->required();

    EvalConfig eval;
    auto* e = app.add_subcommand("eval", "Evaluate a polynomial on a grid CSV");
    e->add_option("poly", eval.poly, "Container")->required()->check(CLI::ExistingFile);
    e->add_option("grid", eval.grid, "Grid CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--out", eval.out, "Output CSV")->required();
    e->add_option("--threads", eval.threads, "Worker threads (0 = all cores)")->capture_default_str();

    CalibrateConfig cal;
    auto* k = app.add_subcommand("calibrate", "Fit model parameters to a quotes CSV");
    k->add_option("poly", cal.poly, "Container")->required()->check(CLI::ExistingFile);
    k->add_option("quotes", cal.quotes, "Quotes CSV")->required()->check(CLI::ExistingFile);
    k->add_option("--out", cal.out, "Result JSON")->required();
    k->add_option("--model", cal.model, "Model the polynomial was built from")
        ->check(CLI::IsMember({"ngarch", "heston", "lognormal"}))
        ->capture_default_str();
    k->add_option("--vars", cal.vars, "Variables of the polynomial, in order (default: all)");
    k->add_option("--set", cal.sets, "Fallback value for a parameter, name=value");
    k->add_option("--strategy", cal.strategy, "nelder-mead or gradient")->capture_default_str();
    k->add_option("--starts", cal.starts, "Multi-start count")->capture_default_str();
    k->add_option("--threads", cal.threads, "Worker threads (0 = all cores)")->capture_default_str();

    BenchConfig bench;
    auto* n = app.add_subcommand("bench", "Degree-doubling convergence table as CSV");
    add_oracle_flags(n, bench.oracle);
    n->add_option("--levels", bench.levels, "Degrees to tabulate")->delimiter(',')->capture_default_str();
    n->add_option("--control", bench.control, "Control grid subdivisions per axis")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*b) return cmd_build(build, std::cout);
        if (*c) return cmd_compress(compress, std::cout);
        if (*e) return cmd_eval(eval, std::cout);
        if (*k) return cmd_calibrate(cal, std::cout);
        if (*n) return cmd_bench(bench, std::cout);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
