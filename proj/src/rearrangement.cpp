#include "talenti/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace talenti {

namespace {

void check_cells(const std::vector<WeightedCell>& cells) {
    double sum = 0.0;
    for (const auto& c : cells) {
        if (!std::isfinite(c.value))
            throw std::invalid_argument("cell values must be finite");
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
            throw std::invalid_argument("cell weights must be finite and non-negative");
        sum += c.weight;
    }
    if (!(sum > 0.0))
        throw std::invalid_argument("total mass must be positive");
}

// Indices of positive-weight cells sorted by |value| descending; zero-weight
// cells are null sets and never influence rearrangements or norms.
std::vector<std::size_t> sorted_support(const std::vector<WeightedCell>& cells) {
    std::vector<std::size_t> idx;
    idx.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].weight > 0.0)
            idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(cells[a].value) > std::abs(cells[b].value);
    });
    return idx;
}

} // namespace

WeightedFunction::WeightedFunction(std::vector<WeightedCell> cells) : cells_(std::move(cells)) {
    check_cells(cells_);
    total_mass_ = 0.0;
    for (const auto& c : cells_)
        total_mass_ += c.weight;
}

WeightedFunction::WeightedFunction(std::vector<double> values, std::vector<double> weights) {
    if (values.size() != weights.size())
        throw std::invalid_argument("values/weights size mismatch");
    cells_.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        cells_[i] = {values[i], weights[i]};
    check_cells(cells_);
    total_mass_ = 0.0;
    for (const auto& c : cells_)
        total_mass_ += c.weight;
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() != values_.size() + 1)
        throw std::invalid_argument("need one more breakpoint than values");
    if (breakpoints_.empty() || breakpoints_.front() != 0.0)
        throw std::invalid_argument("breakpoints must start at 0");
    widths_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        widths_[i] = breakpoints_[i + 1] - breakpoints_[i];
        if (!(widths_[i] > 0.0))
            throw std::invalid_argument("breakpoints must be strictly increasing");
    }
}

StepFunction StepFunction::constant(double value, double mass) {
    if (!(mass > 0.0))
        throw std::invalid_argument("constant step function needs positive mass");
    return StepFunction({0.0, mass}, {value});
}

double StepFunction::operator()(double s) const {
    if (empty())
        throw std::logic_error("evaluating empty step function");
    if (s <= breakpoints_.front())
        return values_.front();
    if (s >= breakpoints_.back())
        return values_.back();
    // Left continuity: the value on (b[i], b[i+1]] is values[i].
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
    return values_[i - 1];
}

double StepFunction::integral(double upto) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (upto <= breakpoints_[i])
            break;
        const double len = std::min(upto, breakpoints_[i + 1]) - breakpoints_[i];
        acc += (len >= widths_[i] ? widths_[i] : len) * values_[i];
    }
    return acc;
}

double StepFunction::power_integral(double p, double upto) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (upto <= breakpoints_[i])
            break;
        const double len = std::min(upto, breakpoints_[i + 1]) - breakpoints_[i];
        acc += (len >= widths_[i] ? widths_[i] : len) * std::pow(std::abs(values_[i]), p);
    }
    return acc;
}

double distribution_function(const WeightedFunction& u, double t) {
    if (!(t >= 0.0))
        throw std::invalid_argument("distribution function takes t >= 0");
    // Accumulate in sorted order: the partial sums are then bit-identical to
    // the rearrangement breakpoints.
    double acc = 0.0;
    for (std::size_t i : sorted_support(u.cells())) {
        if (!(std::abs(u.cells()[i].value) > t))
            break;
        acc += u.cells()[i].weight;
    }
    return acc;
}

StepFunction decreasing_rearrangement(const WeightedFunction& u) {
    const auto& cells = u.cells();
    const auto order = sorted_support(cells);

    StepFunction out;
    out.breakpoints_.push_back(0.0);
    double acc = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
        const double v = std::abs(cells[order[k]].value);
        double group_w = 0.0;
        while (k < order.size() && std::abs(cells[order[k]].value) == v) {
            group_w += cells[order[k]].weight;
            ++k;
        }
        acc += group_w;
        out.values_.push_back(v);
        out.widths_.push_back(group_w);
        out.breakpoints_.push_back(acc);
    }
    return out;
}

SchwarzSymmetrization::SchwarzSymmetrization(const WeightedFunction& u, const ModelParams& p)
    : SchwarzSymmetrization(decreasing_rearrangement(u), p) {}

SchwarzSymmetrization::SchwarzSymmetrization(StepFunction sharp, const ModelParams& p)
    : sharp_(std::move(sharp)), params_(p) {
    const double v = sharp_.total_mass();
    if (!(v > 0.0) || v > 1.0 + 1e-12)
        throw std::invalid_argument("symmetrization needs total mass in (0, 1]");
    r_v_ = inv_H(params_, std::min(v, 1.0));
}

double SchwarzSymmetrization::operator()(double x) const {
    if (x <= 0.0)
        return sharp_.values().front();
    if (x >= r_v_)
        return sharp_.values().back(); // left-continuous at the outer radius
    return sharp_(eval_H(params_, x));
}

SchwarzSymmetrization schwarz_symmetrize(const WeightedFunction& u, const ModelParams& p) {
    return SchwarzSymmetrization(u, p);
}

double hardy_littlewood_bound(const WeightedFunction& f, double subset_mass) {
    if (subset_mass < 0.0 || subset_mass > f.total_mass() * (1.0 + 1e-12))
        throw std::invalid_argument("subset mass outside [0, total mass]");
    return decreasing_rearrangement(f).integral(subset_mass);
}

double lp_norm(const WeightedFunction& u, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("p must be >= 1 (or infinity)");
    const auto& cells = u.cells();
    const auto order = sorted_support(cells);
    if (std::isinf(p))
        return order.empty() ? 0.0 : std::abs(cells[order.front()].value);
    double acc = 0.0;
    for (std::size_t i : order)
        acc += cells[i].weight * std::pow(std::abs(cells[i].value), p);
    return std::pow(acc, 1.0 / p);
}

double lp_norm(const StepFunction& u, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("p must be >= 1 (or infinity)");
    if (u.empty())
        return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : u.values())
            m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i)
        acc += u.widths()[i] * std::pow(std::abs(u.values()[i]), p);
    return std::pow(acc, 1.0 / p);
}

WeightedFunction sample_equal_measure(const ModelParams& p, const std::function<double(double)>& f,
                                      double mass, int n_cells) {
    if (!(mass > 0.0) || mass > 1.0)
        throw std::invalid_argument("mass must lie in (0, 1]");
    if (n_cells < 1)
        throw std::invalid_argument("need at least one cell");
    std::vector<WeightedCell> cells(static_cast<std::size_t>(n_cells));
    const double w = mass / n_cells;
    for (int i = 0; i < n_cells; ++i) {
        const double mid = mass * (i + 0.5) / n_cells;
        cells[static_cast<std::size_t>(i)] = {f(inv_H(p, mid)), w};
    }
    return WeightedFunction(std::move(cells));
}

} // namespace talenti
