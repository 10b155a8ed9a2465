#pragma once

#include "talenti/model_space.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace talenti {

// A measurable function on a finite measure space, sampled as cells of
// (value, weight). Weights are the cell measures; their sum is the measure of
// the domain and must lie in (0, 1] for the symmetrization routines.
struct WeightedCell {
    double value = 0.0;
    double weight = 0.0;
};

class WeightedFunction {
public:
    WeightedFunction() = default;
    explicit WeightedFunction(std::vector<WeightedCell> cells);
    WeightedFunction(std::vector<double> values, std::vector<double> weights);

    const std::vector<WeightedCell>& cells() const { return cells_; }
    double total_mass() const { return total_mass_; }
    std::size_t size() const { return cells_.size(); }

private:
    std::vector<WeightedCell> cells_;
    double total_mass_ = 0.0;
};

// Non-increasing, left-continuous step function on [0, total_mass].
// values[i] lives on (breakpoints[i], breakpoints[i+1]]; the value at 0 is
// values[0]. widths[i] carries the exact step measure used during
// construction, so integrals reproduce the source weights bit-for-bit.
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> breakpoints, std::vector<double> values);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& widths() const { return widths_; }
    double total_mass() const { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }
    bool empty() const { return values_.empty(); }

    double operator()(double s) const;

    // Integral over [0, upto].
    double integral(double upto) const;
    // Integral of |value|^p over [0, upto].
    double power_integral(double p, double upto) const;

    static StepFunction constant(double value, double mass);

private:
    friend StepFunction decreasing_rearrangement(const WeightedFunction&);
    std::vector<double> breakpoints_;
    std::vector<double> values_;
    std::vector<double> widths_;
};

// Measure of {|u| > t}.
double distribution_function(const WeightedFunction& u, double t);

// Decreasing rearrangement u#: sort by |value| descending, merge ties,
// accumulate weights into breakpoints. Equimeasurable with |u|.
StepFunction decreasing_rearrangement(const WeightedFunction& u);

// u* = u# o H: the radially non-increasing representative of u on the model
// interval [0, r_v], r_v = H^{-1}(total mass).
class SchwarzSymmetrization {
public:
    SchwarzSymmetrization(const WeightedFunction& u, const ModelParams& p);
    SchwarzSymmetrization(StepFunction sharp, const ModelParams& p);

    double operator()(double x) const;
    double radius() const { return r_v_; }
    const StepFunction& sharp() const { return sharp_; }
    const ModelParams& params() const { return params_; }

private:
    StepFunction sharp_;
    ModelParams params_;
    double r_v_;
};

SchwarzSymmetrization schwarz_symmetrize(const WeightedFunction& u, const ModelParams& p);

// int_0^{subset_mass} f#(s) ds; bounds int_E f over any subset E of that mass.
double hardy_littlewood_bound(const WeightedFunction& f, double subset_mass);

// Weighted L^p norm, p >= 1 or infinity. Cells are accumulated in decreasing
// |value| order so the result matches the norm of the rearrangement exactly.
double lp_norm(const WeightedFunction& u, double p);
double lp_norm(const StepFunction& u, double p);

constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

// Sample an analytic function on [0, D] into equal-measure cells with respect
// to the model measure (midpoint values). Discretization is O(1/n_cells) in
// sup metric for Lipschitz inputs.
WeightedFunction sample_equal_measure(const ModelParams& p, const std::function<double(double)>& f,
                                      double mass, int n_cells = 4096);

} // namespace talenti
