#pragma once

#include "chebrb/interpolant.hpp"
#include "chebrb/models.hpp"
#include "chebrb/reduced_basis.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace chebrb {

/// The calibrated NGARCH parameters, in this order.
inline constexpr std::size_t kFreeCount = 5;
using FreeParams = std::array<double, kFreeCount>;
inline const std::array<std::string, kFreeCount> kFreeNames = {"sigma2_0", "beta0", "beta1",
                                                               "beta2", "lambda_theta"};

/// Per-coordinate interval of the search box. min == max pins a parameter.
using CalibrationBox = std::array<Bounds, kFreeCount>;

class Pricer {
public:
    virtual ~Pricer() = default;
    /// Model price of every quote at the given parameters.
    virtual std::vector<double> price(const FreeParams& params, const QuoteSet& quotes) const = 0;
};

/// Evaluates a polynomial on a product grid in domain coordinates.
using GridEvaluator = std::function<NdArray(const ProductGrid&)>;

/// Prices quotes through a polynomial built at strike 1. Each polynomial
/// dimension is named: "t_m" takes the quote maturity in days, "s0" the
/// spot / strike ratio, "r" the annual rate, the free parameter names take
/// the current parameters, and anything else must be pinned in `fixed`.
/// Prices are rescaled by the strike.
class PolynomialPricer : public Pricer {
public:
    PolynomialPricer(Domain domain, std::vector<std::string> variables, GridEvaluator eval,
                     std::map<std::string, double> fixed = {});

    std::vector<double> price(const FreeParams& params, const QuoteSet& quotes) const override;

    const Domain& domain() const noexcept { return domain_; }
    /// Box implied by the polynomial domain; free parameters the polynomial
    /// does not depend on are pinned at `fallback`.
    CalibrationBox box(const FreeParams& fallback) const;

private:
    enum class Role { maturity, spot, rate, free, fixed };
    struct Slot {
        Role role;
        std::size_t free_index = 0;
        double value = 0.0;
    };

    double check(std::size_t dim, double v) const;

    Domain domain_;
    std::vector<std::string> variables_;
    std::vector<Slot> slots_;
    GridEvaluator eval_;
};

std::shared_ptr<PolynomialPricer> make_pricer(std::shared_ptr<const Interpolant> p,
                                              std::vector<std::string> variables,
                                              std::map<std::string, double> fixed = {});
std::shared_ptr<PolynomialPricer> make_pricer(std::shared_ptr<const ReducedPolynomial> q,
                                              std::vector<std::string> variables,
                                              std::map<std::string, double> fixed = {});

/// Direct NGARCH Monte Carlo with common random numbers across quotes.
class McPricer : public Pricer {
public:
    explicit McPricer(McConfig cfg) : cfg_(cfg) {}
    std::vector<double> price(const FreeParams& params, const QuoteSet& quotes) const override;

private:
    McConfig cfg_;
};

double in_mse(const FreeParams& params, const QuoteSet& quotes, const Pricer& pricer);

enum class Strategy { nelder_mead, gradient_descent };

struct CalibrationOptions {
    Strategy strategy = Strategy::nelder_mead;
    std::size_t starts = 5;
    std::size_t max_iterations = 4000;  // per start
    double ftol = 1e-13;                // relative spread of simplex values
    double xtol = 1e-9;                 // simplex diameter, unit-box coordinates
    double fd_h = 1e-6;                 // reference-coordinate step of the gradient check
    std::size_t threads = 0;
};

struct CalibrationResult {
    FreeParams params{};
    double in_mse = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Norm of the projected finite-difference gradient at params, taken in
    /// reference coordinates of the box.
    double gradient_norm = 0.0;
    /// Objective at each start point.
    std::vector<double> start_mse;
};

CalibrationResult calibrate(const QuoteSet& quotes, const Pricer& pricer,
                            const CalibrationBox& box, const CalibrationOptions& opts = {});

struct PredictionScore {
    double max_abs_err = 0.0;
    double mean_abs_err = 0.0;
};

PredictionScore predict_and_score(const FreeParams& params, const QuoteSet& new_quotes,
                                  const Pricer& pricer);

/// Minimizes f over [0, 1]^d with Nelder-Mead, projecting trial points back
/// into the box.
struct MinimizeResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    bool tolerance_met = false;
};

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, std::size_t max_iterations, double ftol,
                           double xtol);

/// Projected gradient descent with backtracking on forward differences.
MinimizeResult projected_gradient(const std::function<double(const std::vector<double>&)>& f,
                                  std::vector<double> start, std::size_t max_iterations,
                                  double ftol, double h);

/// Halton point `index` (1-based) in the first `dims` prime bases.
std::vector<double> halton(std::size_t index, std::size_t dims);

}  // namespace chebrb
