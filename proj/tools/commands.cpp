#include "commands.hpp"

#include "model_registry.hpp"

#include "chebrb/calibration.hpp"
#include "chebrb/container.hpp"
#include "chebrb/csv_io.hpp"
#include "chebrb/errors.hpp"
#include "chebrb/parallel.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace chebrb::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError(what + ": '" + s + "' is not a number");
    }
}

std::vector<std::size_t> parse_degrees(const std::string& s, std::size_t n) {
    std::vector<std::size_t> out;
    for (const auto& item : split_on(s, ',')) {
        const double v = parse_number(item, "--degrees");
        if (v < 1 || v != std::floor(v)) throw DomainError("--degrees: every degree must be an integer >= 1");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.size() == 1) out.assign(n, out[0]);
    if (out.size() != n) {
        throw DimensionError("--degrees: expected 1 or " + std::to_string(n) + " values, got " +
                             std::to_string(out.size()));
    }
    return out;
}

Domain parse_domain(const Layout& layout, const std::string& s) {
    if (s.empty()) return layout.default_domain();
    const auto items = split_on(s, ',');
    if (items.size() != layout.varied.size()) {
        throw DimensionError("--bounds: expected " + std::to_string(layout.varied.size()) +
                             " min:max pairs, got " + std::to_string(items.size()));
    }
    std::vector<Bounds> b;
    for (const auto& item : items) {
        const auto parts = split_on(item, ':');
        if (parts.size() != 2) throw DomainError("--bounds: '" + item + "' is not min:max");
        b.push_back({parse_number(parts[0], "--bounds"), parse_number(parts[1], "--bounds")});
    }
    return Domain(b);
}

McConfig mc_config(const OracleConfig& o) {
    if (o.paths < 1) throw DomainError("--paths must be >= 1");
    return {o.paths, o.seed, o.antithetic, 1};
}

IndexedOracle make_oracle(const Layout& layout, const McConfig& mc) {
    return [layout, mc](std::span<const double> point, std::size_t node) {
        auto cfg = mc;
        cfg.seed = node_seed(mc.seed, node);
        return layout.model->price(layout.full(point), cfg);
    };
}

std::string join(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

int cmd_build(const BuildConfig& cfg, std::ostream& log) {
    if (cfg.out.empty()) throw DomainError("build: --out is required");
    const auto layout = make_layout(cfg.oracle.model, cfg.oracle.vars, cfg.oracle.sets);
    const auto domain = parse_domain(layout, cfg.oracle.bounds);
    const auto degrees = parse_degrees(cfg.oracle.degrees, domain.dims());
    const auto oracle = make_oracle(layout, mc_config(cfg.oracle));
    BuildOptions opts{cfg.oracle.threads};

    const auto bytes = full_tensor_bytes(degrees);
    const bool oversized = bytes > cfg.split_threshold;
    if (oversized && !cfg.split) {
        throw DomainError("full coefficient tensor needs " + std::to_string(bytes) +
                          " bytes, above the " + std::to_string(cfg.split_threshold) +
                          "-byte limit; pass --split to build in split form");
    }
    if (cfg.split && cfg.split_axis >= domain.dims()) {
        throw DimensionError("--split-axis " + std::to_string(cfg.split_axis) + " out of range");
    }

    const auto t0 = Clock::now();
    const Polynomial p = cfg.split ? build_split(oracle, domain, degrees, cfg.split_axis, opts)
                                   : build(oracle, domain, degrees, opts);
    const double wall = seconds_since(t0);
    write_container(cfg.out, p);

    std::size_t nodes = 1;
    for (auto N : degrees) nodes *= N + 1;
    log << "model: " << layout.model->name << "\n";
    log << "variables: ";
    const auto names = layout.names();
    for (std::size_t i = 0; i < names.size(); ++i) log << (i ? "," : "") << names[i];
    log << "\ndegrees: " << join(degrees) << "\n";
    log << "kind: " << static_cast<int>(kind_of(p)) << "\n";
    log << "nodes: " << nodes << "\n";
    log << "oracle_calls: " << nodes << "\n";
    log << "wall_time_s: " << wall << "\n";
    log << "wrote: " << cfg.out.string() << "\n";
    return 0;
}

int cmd_compress(const CompressConfig& cfg, std::ostream& log) {
    if (cfg.out.empty()) throw DomainError("compress: --out is required");
    const auto poly = read_container(cfg.in);
    const auto* p = std::get_if<Interpolant>(&poly);
    if (p == nullptr || p->is_split()) throw FormatError("compress: input must be a kind-0 container");

    TruncationSpec spec;
    spec.epsilon = cfg.epsilon;
    spec.allow_roundoff_floor = cfg.allow_floor;
    const auto t0 = Clock::now();
    const auto res = compress_with_report(*p, spec);
    const double wall = seconds_since(t0);
    write_container(cfg.out, res.poly);

    std::vector<std::size_t> ext;
    for (auto N : p->degrees()) ext.push_back(N + 1);
    const auto report = storage_report(res.poly, ext);
    log.precision(6);
    log << "retained: " << join(res.poly.retained()) << "\n";
    log << "full_bytes: " << report.full_bytes << "\n";
    log << "reduced_bytes: " << report.reduced_bytes << "\n";
    log << "savings_percent: " << 100.0 * report.savings_fraction << "\n";
    log << "mse_phi: " << res.mse_phi << "\n";
    if (res.floor_limited) log << "note: epsilon below round-off floor, nothing truncated\n";
    log << "wall_time_s: " << wall << "\n";
    log << "wrote: " << cfg.out.string() << "\n";
    return 0;
}

int cmd_eval(const EvalConfig& cfg, std::ostream& log) {
    if (cfg.out.empty()) throw DomainError("eval: --out is required");
    const auto poly = read_container(cfg.poly);
    const auto grid = read_grid(cfg.grid);
    const std::size_t n = std::visit([](const auto& p) { return p.dims(); }, poly);
    if (grid_dims(grid) != n) {
        throw DimensionError("grid has " + std::to_string(grid_dims(grid)) +
                             " dimensions, polynomial has " + std::to_string(n));
    }

    const auto t0 = Clock::now();
    std::vector<double> values;
    if (const auto* g = std::get_if<ProductGrid>(&grid)) {
        const NdArray v = std::visit(
            [&](const auto& p) {
                if constexpr (std::is_same_v<std::decay_t<decltype(p)>, Interpolant>) return eval_grid(p, *g);
                else return eval_reduced_grid(p, *g);
            },
            poly);
        values = v.values();
    } else {
        const auto& pts = std::get<PointSet>(grid).points;
        values.resize(pts.size());
        parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
            values[i] = std::visit([&](const auto& p) { return eval_point(p, pts[i]); }, poly);
        });
    }
    const double wall = seconds_since(t0);

    std::ofstream out(cfg.out);
    if (!out) throw FormatError("cannot open " + cfg.out.string() + " for writing");
    write_values(out, grid, values);
    log << "points: " << values.size() << "\n";
    log << "eval_time_s: " << wall << "\n";
    log << "wrote: " << cfg.out.string() << "\n";
    return 0;
}

int cmd_calibrate(const CalibrateConfig& cfg, std::ostream& log) {
    if (cfg.out.empty()) throw DomainError("calibrate: --out is required");
    const auto layout = make_layout(cfg.model, cfg.vars, cfg.sets);
    auto poly = read_container(cfg.poly);
    const auto quotes = read_quotes(cfg.quotes);

    std::shared_ptr<PolynomialPricer> pricer;
    if (auto* p = std::get_if<Interpolant>(&poly)) {
        pricer = make_pricer(std::make_shared<const Interpolant>(std::move(*p)), layout.names());
    } else {
        pricer = make_pricer(std::make_shared<const ReducedPolynomial>(std::get<ReducedPolynomial>(std::move(poly))),
                             layout.names());
    }

    FreeParams fallback{};
    for (std::size_t k = 0; k < kFreeCount; ++k) {
        const auto& vars = layout.model->variables;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].name == kFreeNames[k]) fallback[k] = layout.base[i];
        }
    }
    CalibrationOptions opts;
    if (cfg.strategy == "nelder-mead") opts.strategy = Strategy::nelder_mead;
    else if (cfg.strategy == "gradient") opts.strategy = Strategy::gradient_descent;
    else throw DomainError("--strategy must be nelder-mead or gradient");
    opts.starts = cfg.starts;
    opts.threads = cfg.threads;

    const auto t0 = Clock::now();
    const auto res = calibrate(quotes, *pricer, pricer->box(fallback), opts);
    const double wall = seconds_since(t0);

    nlohmann::ordered_json j;
    for (std::size_t k = 0; k < kFreeCount; ++k) j["params"][kFreeNames[k]] = res.params[k];
    j["in_mse"] = res.in_mse;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["gradient_norm"] = res.gradient_norm;
    j["quotes"] = quotes.size();
    j["wall_time_s"] = wall;
    std::ofstream out(cfg.out);
    if (!out) throw FormatError("cannot open " + cfg.out.string() + " for writing");
    out << j.dump(2) << "\n";

    log.precision(6);
    log << "quotes: " << quotes.size() << "\n";
    log << "in_mse: " << res.in_mse << "\n";
    log << "converged: " << (res.converged ? "true" : "false") << "\n";
    log << "wall_time_s: " << wall << "\n";
    log << "wrote: " << cfg.out.string() << "\n";
    return 0;
}

int cmd_bench(const BenchConfig& cfg, std::ostream& out) {
    const auto layout = make_layout(cfg.oracle.model, cfg.oracle.vars, cfg.oracle.sets);
    const auto domain = parse_domain(layout, cfg.oracle.bounds);
    const auto mc = mc_config(cfg.oracle);
    const auto oracle = make_oracle(layout, mc);
    const auto control = control_grid(domain, cfg.control);

    // Reference prices on the control grid, seeded past every node index.
    NdArray reference(control.extents());
    const std::size_t offset = std::size_t{1} << 40;
    parallel_for(reference.size(), cfg.oracle.threads, [&](std::size_t flat) {
        std::vector<double> x(domain.dims());
        std::size_t rest = flat;
        for (std::size_t j = domain.dims(); j-- > 0;) {
            x[j] = control.axes[j][rest % control.axes[j].size()];
            rest /= control.axes[j].size();
        }
        reference[flat] = oracle(x, offset + flat);
    });

    out << "N,storage_bytes,build_s,eval_s,control_mse,control_max_err\n";
    out.precision(8);
    std::vector<double> lx, ly;
    for (auto N : cfg.levels) {
        const std::vector<std::size_t> degrees(domain.dims(), N);
        auto t0 = Clock::now();
        const auto p = build(oracle, domain, degrees, {cfg.oracle.threads});
        const double build_s = seconds_since(t0);
        t0 = Clock::now();
        const auto values = eval_grid(p, control);
        const double eval_s = seconds_since(t0);
        const double mse = mean_squared_difference(values.data(), reference.data());
        double max_err = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            max_err = std::max(max_err, std::abs(values[i] - reference[i]));
        }
        const auto storage = full_tensor_bytes(degrees);
        out << N << ',' << storage << ',' << build_s << ',' << eval_s << ',' << mse << ',' << max_err << "\n";
        if (mse > 0.0) {
            lx.push_back(std::log(static_cast<double>(storage)));
            ly.push_back(std::log(mse));
        }
    }
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i] / lx.size();
            my += ly[i] / ly.size();
        }
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        out << "# loglog_slope," << sxy / sxx << "\n";
    }
    return 0;
}

}  // namespace chebrb::cli
