#include "model_registry.hpp"

#include "chebrb/errors.hpp"

#include <algorithm>
#include <sstream>

namespace chebrb::cli {

namespace {

double ngarch(std::span<const double> v, const McConfig& cfg) {
    NgarchParams p;
    p.t_m = v[0];
    p.sigma2_0 = v[1];
    p.s0 = v[2];
    p.r = v[3] / 365.0;
    p.beta0 = v[4];
    p.beta1 = v[5];
    p.beta2 = v[6];
    p.lambda_theta = v[7];
    return ngarch_price(p, 1.0, cfg).price;
}

double lognormal(std::span<const double> v, const McConfig&) {
    return lognormal_call(v[2], 1.0, v[3] / 365.0 * v[0], v[1] * v[0]);
}

double heston(std::span<const double> v, const McConfig& cfg) {
    HestonParams p;
    p.v0 = v[2];
    p.r = v[3];
    p.kappa = v[4];
    p.theta_star = v[5];
    p.sigma_star = v[6];
    p.rho = v[7];
    return heston_price(p, v[1], 1.0, v[0], cfg).price;
}

const std::vector<ModelSpec>& registry() {
    static const std::vector<ModelSpec> models = {
        {"ngarch",
         {{"t_m", {0.0, 365.0}, 180.0},
          {"sigma2_0", {0.25e-4, 2.25e-4}, 1e-4},
          {"s0", {0.75, 1.20}, 1.0},
          {"r", {0.02, 0.085}, 0.05},
          {"beta0", {0.0, 2e-6}, 1e-6},
          {"beta1", {0.60, 0.95}, 0.8},
          {"beta2", {0.02, 0.25}, 0.1},
          {"lambda_theta", {0.20, 2.0}, 1.0}},
         true,
         ngarch},
        {"lognormal",
         {{"t_m", {0.0, 365.0}, 180.0},
          {"sigma2_0", {0.25e-4, 2.25e-4}, 1e-4},
          {"s0", {0.75, 1.20}, 1.0},
          {"r", {0.02, 0.085}, 0.05}},
         false,
         lognormal},
        {"heston",
         {{"t_m", {0.0, 365.0}, 180.0},
          {"s0", {0.75, 1.20}, 1.0},
          {"v0", {0.01, 0.09}, 0.04},
          {"r", {0.02, 0.085}, 0.05},
          {"kappa", {0.5, 4.0}, 2.0},
          {"theta", {0.01, 0.09}, 0.04},
          {"sigma", {0.1, 0.6}, 0.3},
          {"rho", {-0.9, 0.0}, -0.5}},
         true,
         heston},
    };
    return models;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

std::size_t ModelSpec::index_of(std::string_view var) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].name == var) return i;
    }
    throw DomainError("model " + name + " has no variable '" + std::string(var) + "'");
}

const ModelSpec& find_model(std::string_view name) {
    for (const auto& m : registry()) {
        if (m.name == name) return m;
    }
    throw DomainError("unknown model '" + std::string(name) + "' (expected ngarch, heston or lognormal)");
}

std::vector<std::string> Layout::names() const {
    std::vector<std::string> out;
    for (auto i : varied) out.push_back(model->variables[i].name);
    return out;
}

Domain Layout::default_domain() const {
    std::vector<Bounds> b;
    for (auto i : varied) b.push_back(model->variables[i].bounds);
    return Domain(b);
}

std::vector<double> Layout::full(std::span<const double> point) const {
    auto v = base;
    for (std::size_t k = 0; k < varied.size(); ++k) v[varied[k]] = point[k];
    return v;
}

std::map<std::string, double> Layout::pinned() const {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (std::find(varied.begin(), varied.end(), i) == varied.end()) {
            out[model->variables[i].name] = base[i];
        }
    }
    return out;
}

Layout make_layout(std::string_view model, const std::string& vars,
                   const std::vector<std::string>& sets) {
    Layout l;
    l.model = &find_model(model);
    for (const auto& v : l.model->variables) l.base.push_back(v.default_value);
    const auto names = split_list(vars);
    if (names.empty()) {
        for (std::size_t i = 0; i < l.base.size(); ++i) l.varied.push_back(i);
    } else {
        for (const auto& n : names) {
            const auto i = l.model->index_of(n);
            if (std::find(l.varied.begin(), l.varied.end(), i) != l.varied.end()) {
                throw DomainError("variable '" + n + "' listed twice");
            }
            l.varied.push_back(i);
        }
    }
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects name=value, got '" + s + "'");
        const auto i = l.model->index_of(s.substr(0, eq));
        try {
            l.base[i] = std::stod(s.substr(eq + 1));
        } catch (const std::exception&) {
            throw DomainError("--set " + s + ": value is not a number");
        }
    }
    return l;
}

}  // namespace chebrb::cli
