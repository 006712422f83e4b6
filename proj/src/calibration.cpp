#include "chebrb/calibration.hpp"

#include "chebrb/errors.hpp"
#include "chebrb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace chebrb {

namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::size_t index_in(const std::vector<double>& axis, double v) {
    return static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), v) - axis.begin());
}

void clamp_unit(std::vector<double>& x) {
    for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------

PolynomialPricer::PolynomialPricer(Domain domain, std::vector<std::string> variables,
                                   GridEvaluator eval, std::map<std::string, double> fixed)
    : domain_(std::move(domain)), variables_(std::move(variables)), eval_(std::move(eval)) {
    if (variables_.size() != domain_.dims()) {
        throw DimensionError("pricer: " + std::to_string(variables_.size()) +
                             " variable names for a " + std::to_string(domain_.dims()) +
                             "-dimensional polynomial");
    }
    bool has_maturity = false, has_spot = false;
    for (const auto& name : variables_) {
        Slot s{Role::fixed};
        if (name == "t_m") {
            s.role = Role::maturity;
            has_maturity = true;
        } else if (name == "s0") {
            s.role = Role::spot;
            has_spot = true;
        } else if (name == "r") {
            s.role = Role::rate;
        } else if (auto it = fixed.find(name); it != fixed.end()) {
            s.value = it->second;
        } else {
            const auto f = std::find(kFreeNames.begin(), kFreeNames.end(), name);
            if (f == kFreeNames.end()) {
                throw DomainError("pricer: variable '" + name +
                                  "' is neither a quote coordinate nor a free parameter");
            }
            s.role = Role::free;
            s.free_index = static_cast<std::size_t>(f - kFreeNames.begin());
        }
        slots_.push_back(s);
    }
    if (!has_maturity || !has_spot) {
        throw DimensionError("pricer: polynomial must depend on t_m and s0");
    }
}

double PolynomialPricer::check(std::size_t dim, double v) const {
    if (!domain_.contains(dim, v)) {
        std::ostringstream os;
        os.precision(10);
        os << variables_[dim] << " = " << v << " lies outside [" << domain_[dim].min << ", "
           << domain_[dim].max << "]";
        throw DomainError(os.str());
    }
    return v;
}

std::vector<double> PolynomialPricer::price(const FreeParams& params, const QuoteSet& quotes) const {
    if (quotes.empty()) throw DomainError("pricer: empty quote set");
    const std::size_t n = domain_.dims();
    ProductGrid grid;
    grid.axes.resize(n);
    auto coordinate = [&](const Slot& s, const Quote& q) {
        switch (s.role) {
            case Role::maturity: return q.maturity_days;
            case Role::spot: return q.spot / q.strike;
            case Role::rate: return q.rate_annual;
            case Role::free: return params[s.free_index];
            case Role::fixed: break;
        }
        return s.value;
    };
    std::size_t grid_size = 1;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> v;
        for (const auto& q : quotes) v.push_back(check(j, coordinate(slots_[j], q)));
        grid.axes[j] = unique_sorted(std::move(v));
        grid_size *= grid.axes[j].size();
    }

    std::vector<double> out(quotes.size());
    if (grid_size <= std::max<std::size_t>(64, 4 * quotes.size())) {
        const NdArray values = eval_(grid);
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < quotes.size(); ++i) {
            for (std::size_t j = 0; j < n; ++j) idx[j] = index_in(grid.axes[j], coordinate(slots_[j], quotes[i]));
            out[i] = quotes[i].strike * values.at(idx);
        }
        return out;
    }
    ProductGrid point;
    point.axes.assign(n, std::vector<double>(1));
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) point.axes[j][0] = coordinate(slots_[j], quotes[i]);
        out[i] = quotes[i].strike * eval_(point)[0];
    }
    return out;
}

CalibrationBox PolynomialPricer::box(const FreeParams& fallback) const {
    CalibrationBox b;
    for (std::size_t k = 0; k < kFreeCount; ++k) b[k] = {fallback[k], fallback[k]};
    for (std::size_t j = 0; j < slots_.size(); ++j) {
        if (slots_[j].role == Role::free) b[slots_[j].free_index] = domain_[j];
    }
    return b;
}

std::shared_ptr<PolynomialPricer> make_pricer(std::shared_ptr<const Interpolant> p,
                                              std::vector<std::string> variables,
                                              std::map<std::string, double> fixed) {
    auto dom = p->domain();
    return std::make_shared<PolynomialPricer>(
        std::move(dom), std::move(variables),
        [p](const ProductGrid& g) { return eval_grid(*p, g); }, std::move(fixed));
}

std::shared_ptr<PolynomialPricer> make_pricer(std::shared_ptr<const ReducedPolynomial> q,
                                              std::vector<std::string> variables,
                                              std::map<std::string, double> fixed) {
    auto dom = q->domain();
    return std::make_shared<PolynomialPricer>(
        std::move(dom), std::move(variables),
        [q](const ProductGrid& g) { return eval_reduced_grid(*q, g); }, std::move(fixed));
}

std::vector<double> McPricer::price(const FreeParams& params, const QuoteSet& quotes) const {
    std::vector<double> out;
    out.reserve(quotes.size());
    for (const auto& q : quotes) {
        NgarchParams p;
        p.sigma2_0 = params[0];
        p.beta0 = params[1];
        p.beta1 = params[2];
        p.beta2 = params[3];
        p.lambda_theta = params[4];
        p.r = q.rate_annual / 365.0;
        p.s0 = q.spot / q.strike;
        p.t_m = q.maturity_days;
        out.push_back(q.strike * ngarch_price(p, 1.0, cfg_).price);
    }
    return out;
}

double in_mse(const FreeParams& params, const QuoteSet& quotes, const Pricer& pricer) {
    if (quotes.empty()) throw DomainError("in_mse: empty quote set");
    const auto model = pricer.price(params, quotes);
    double s = 0.0;
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const double d = quotes[i].price - model[i];
        s += d * d;
    }
    return s / static_cast<double>(quotes.size());
}

PredictionScore predict_and_score(const FreeParams& params, const QuoteSet& new_quotes,
                                  const Pricer& pricer) {
    if (new_quotes.empty()) throw DomainError("predict_and_score: empty quote set");
    const auto model = pricer.price(params, new_quotes);
    PredictionScore s;
    for (std::size_t i = 0; i < new_quotes.size(); ++i) {
        const double e = std::abs(new_quotes[i].price - model[i]);
        s.max_abs_err = std::max(s.max_abs_err, e);
        s.mean_abs_err += e;
    }
    s.mean_abs_err /= static_cast<double>(new_quotes.size());
    return s;
}

// ---------------------------------------------------------------------------

std::vector<double> halton(std::size_t index, std::size_t dims) {
    static constexpr std::array<unsigned, 12> primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (dims > primes.size()) throw DomainError("halton: too many dimensions");
    std::vector<double> out(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        double f = 1.0, r = 0.0;
        for (std::size_t i = index; i > 0; i /= primes[d]) {
            f /= primes[d];
            r += f * static_cast<double>(i % primes[d]);
        }
        out[d] = r;
    }
    return out;
}

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, std::size_t max_iterations, double ftol,
                           double xtol) {
    const std::size_t d = start.size();
    clamp_unit(start);
    MinimizeResult res;
    if (d == 0) {
        res.x = start;
        res.f = f(start);
        res.tolerance_met = true;
        return res;
    }
    std::vector<std::vector<double>> x(d + 1, start);
    std::vector<double> fx(d + 1);
    for (std::size_t i = 0; i < d; ++i) {
        const double step = start[i] + 0.1 <= 1.0 ? 0.1 : -0.1;
        x[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= d; ++i) fx[i] = f(x[i]);

    std::vector<std::size_t> order(d + 1);
    auto trial = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> p(d);
        for (std::size_t k = 0; k < d; ++k) p[k] = c[k] + t * (w[k] - c[k]);
        clamp_unit(p);
        return p;
    };

    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
        {
            std::vector<std::vector<double>> xs(d + 1);
            std::vector<double> fs(d + 1);
            for (std::size_t i = 0; i <= d; ++i) {
                xs[i] = x[order[i]];
                fs[i] = fx[order[i]];
            }
            x.swap(xs);
            fx.swap(fs);
        }
        double diam = 0.0;
        for (std::size_t i = 1; i <= d; ++i) {
            for (std::size_t k = 0; k < d; ++k) diam = std::max(diam, std::abs(x[i][k] - x[0][k]));
        }
        if (diam < xtol || fx[d] - fx[0] <= ftol * std::abs(fx[0]) + 1e-300) {
            res.tolerance_met = true;
            break;
        }

        std::vector<double> c(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < d; ++k) c[k] += x[i][k] / static_cast<double>(d);
        }
        const auto xr = trial(c, x[d], -1.0);
        const double fr = f(xr);
        if (fr < fx[0]) {
            const auto xe = trial(c, x[d], -2.0);
            const double fe = f(xe);
            if (fe < fr) {
                x[d] = xe;
                fx[d] = fe;
            } else {
                x[d] = xr;
                fx[d] = fr;
            }
            continue;
        }
        if (fr < fx[d - 1]) {
            x[d] = xr;
            fx[d] = fr;
            continue;
        }
        const bool outside = fr < fx[d];
        const auto xc = outside ? trial(c, xr, 0.5) : trial(c, x[d], 0.5);
        const double fc = f(xc);
        if (outside ? fc <= fr : fc < fx[d]) {
            x[d] = xc;
            fx[d] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= d; ++i) {
            x[i] = trial(x[0], x[i], 0.5);
            fx[i] = f(x[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
    res.x = x[best];
    res.f = fx[best];
    return res;
}

namespace {

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double fx, double h) {
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        auto y = x;
        const bool backward = x[k] + h > 1.0;
        y[k] += backward ? -h : h;
        g[k] = backward ? (fx - f(y)) / h : (f(y) - fx) / h;
    }
    return g;
}

// Gradient with components that push against an active bound removed.
double projected_norm(const std::vector<double>& x, const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if ((x[k] <= 0.0 && g[k] > 0.0) || (x[k] >= 1.0 && g[k] < 0.0)) continue;
        s += g[k] * g[k];
    }
    return std::sqrt(s);
}

}  // namespace

MinimizeResult projected_gradient(const std::function<double(const std::vector<double>&)>& f,
                                  std::vector<double> start, std::size_t max_iterations,
                                  double ftol, double h) {
    clamp_unit(start);
    MinimizeResult res{start, f(start), 0, false};
    double step = 0.1;
    for (; res.iterations < max_iterations; ++res.iterations) {
        const auto g = fd_gradient(f, res.x, res.f, h);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        if (gn == 0.0) {
            res.tolerance_met = true;
            break;
        }
        const double scale = 1.0 / std::sqrt(gn);
        bool accepted = false;
        for (int k = 0; k < 60 && !accepted; ++k, step *= 0.5) {
            auto y = res.x;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] -= step * scale * g[i];
            clamp_unit(y);
            double decrease = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) decrease += g[i] * (res.x[i] - y[i]);
            const double fy = f(y);
            if (decrease > 0.0 && fy <= res.f - 1e-4 * decrease) {
                const double prev = res.f;
                res.x = std::move(y);
                res.f = fy;
                accepted = true;
                if (prev - fy <= ftol * std::abs(prev)) res.tolerance_met = true;
            }
        }
        if (!accepted) {
            res.tolerance_met = true;
            break;
        }
        if (res.tolerance_met) break;
        step *= 4.0;
    }
    return res;
}

// ---------------------------------------------------------------------------

CalibrationResult calibrate(const QuoteSet& quotes, const Pricer& pricer,
                            const CalibrationBox& box, const CalibrationOptions& opts) {
    if (quotes.empty()) throw DomainError("calibrate: empty quote set");
    validate(quotes);
    if (opts.starts == 0) throw DomainError("calibrate: need at least one start");
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < kFreeCount; ++k) {
        if (!(box[k].min <= box[k].max)) {
            throw DomainError("calibrate: empty interval for " + kFreeNames[k]);
        }
        if (box[k].min < box[k].max) active.push_back(k);
    }
    const std::size_t d = active.size();

    auto to_params = [&](const std::vector<double>& u) {
        FreeParams p;
        for (std::size_t k = 0; k < kFreeCount; ++k) p[k] = box[k].min;
        for (std::size_t i = 0; i < d; ++i) {
            const auto& b = box[active[i]];
            p[active[i]] = std::clamp(b.min + u[i] * b.width(), b.min, b.max);
        }
        return p;
    };
    const std::function<double(const std::vector<double>&)> objective =
        [&](const std::vector<double>& u) { return in_mse(to_params(u), quotes, pricer); };

    struct Run {
        MinimizeResult best;
        double start_f = 0.0;
    };
    std::vector<Run> runs(opts.starts);
    parallel_for(opts.starts, opts.threads, [&](std::size_t s) {
        auto u = halton(s + 1, d);
        for (auto& v : u) v = 0.1 + 0.8 * v;
        runs[s].start_f = objective(u);
        MinimizeResult r{u, runs[s].start_f, 0, false};
        std::size_t iterations = 0;
        // Restart from the incumbent until a restart brings no improvement.
        for (int restart = 0; restart < 8 && r.f > 0.0; ++restart) {
            auto next = opts.strategy == Strategy::nelder_mead
                            ? nelder_mead(objective, r.x, opts.max_iterations, opts.ftol, opts.xtol)
                            : projected_gradient(objective, r.x, opts.max_iterations, opts.ftol,
                                                 opts.fd_h / 2.0);
            iterations += next.iterations;
            const bool improved = next.f < r.f;
            if (next.f <= r.f) r = std::move(next);
            if (!improved) break;
        }
        r.iterations = iterations;
        if (r.f == 0.0) r.tolerance_met = true;
        runs[s].best = std::move(r);
    });

    CalibrationResult out;
    std::size_t best = 0;
    bool improved = false;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        out.start_mse.push_back(runs[s].start_f);
        out.iterations += runs[s].best.iterations;
        if (runs[s].best.f < runs[s].start_f || runs[s].start_f == 0.0) improved = true;
        if (runs[s].best.f < runs[best].best.f) best = s;
    }
    const auto& r = runs[best].best;
    out.params = to_params(r.x);
    out.in_mse = r.f;
    out.converged = improved && r.tolerance_met;
    // The unit box maps to reference coordinates by x = 2u - 1.
    const auto g = fd_gradient(objective, r.x, r.f, opts.fd_h / 2.0);
    out.gradient_norm = 0.5 * projected_norm(r.x, g);
    return out;
}

}  // namespace chebrb
