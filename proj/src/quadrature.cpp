#include "talenti/quadrature.hpp"
#include "talenti/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace talenti {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1].
// Abscissae/weights as tabulated in QUADPACK (dqk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    double roundoff_floor;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(c);
    evals += 1;
    double result_g = fc * kWg[3];
    double result_k = fc * kWgk[7];
    double resabs = std::abs(fc) * kWgk[7];

    std::array<double, 7> flo{}, fhi{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        flo[j] = f(c - dx);
        fhi[j] = f(c + dx);
        evals += 2;
        result_k += kWgk[j] * (flo[j] + fhi[j]);
        resabs += kWgk[j] * (std::abs(flo[j]) + std::abs(fhi[j]));
    }
    for (int j = 1; j < 7; j += 2)
        result_g += kWg[(j - 1) / 2] * (flo[j] + fhi[j]);

    const double mean = result_k * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(flo[j] - mean) + std::abs(fhi[j] - mean));

    result_k *= half;
    result_g *= half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);

    double err = std::abs(result_k - result_g);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    double floor = 0.0;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        floor = 50.0 * eps * resabs;
        err = std::max(err, floor);
    }
    return {a, b, result_k, err, floor};
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth) {
    QuadResult out;
    if (a == b)
        return out;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    // Globally adaptive: keep a worst-first queue of panels and bisect the
    // largest-error one until the total estimate meets the tolerance. This is
    // what makes integrable endpoint singularities converge; locally budgeted
    // bisection stalls on them.
    const long max_panels = std::max(64L, 1L << std::min(max_depth, 16));
    const double min_width =
        std::numeric_limits<double>::epsilon() * std::max({std::abs(a), std::abs(b), 1.0});

    std::priority_queue<Panel> active;
    std::vector<Panel> parked; // panels that cannot be improved further
    active.push(gk15(f, a, b, out.evaluations));
    double total_err = active.top().error;
    double total_floor = active.top().roundoff_floor;
    bool cap_hit = false;

    while (!active.empty() && total_err > abs_tol && total_err > 1.001 * total_floor) {
        if (static_cast<long>(active.size() + parked.size()) >= max_panels) {
            cap_hit = true;
            break;
        }
        Panel worst = active.top();
        active.pop();
        if (worst.b - worst.a <= min_width || worst.error <= 1.001 * worst.roundoff_floor) {
            parked.push_back(worst);
            continue;
        }
        total_err -= worst.error;
        total_floor -= worst.roundoff_floor;
        const double m = 0.5 * (worst.a + worst.b);
        const Panel p1 = gk15(f, worst.a, m, out.evaluations);
        const Panel p2 = gk15(f, m, worst.b, out.evaluations);
        total_err += p1.error + p2.error;
        total_floor += p1.roundoff_floor + p2.roundoff_floor;
        active.push(p1);
        active.push(p2);
    }

    double value = 0.0, error = 0.0;
    for (const auto& pnl : parked) {
        value += pnl.value;
        error += pnl.error;
    }
    while (!active.empty()) {
        value += active.top().value;
        error += active.top().error;
        active.pop();
    }
    out.value = sign * value;
    out.error = error;
    out.converged = !cap_hit || error <= abs_tol || error <= 1.001 * total_floor;
    return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth) {
    const QuadResult r = integrate_adaptive(f, a, b, abs_tol, max_depth);
    if (!r.converged) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "adaptive quadrature stalled on [%g, %g]: error estimate %.3e > tolerance "
                      "%.3e",
                      a, b, r.error, abs_tol);
        throw numerical_error(msg);
    }
    return r.value;
}

} // namespace talenti
