#include "latmin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latmin {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (positive half; node 0 last).
const double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
const double kWk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights, aligned with odd-indexed Kronrod nodes (indices 1,3,5) and node 0.
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b,
                 std::uint64_t& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    evals += 15;

    double kron = kWk[7] * fv[7];
    for (int i = 0; i < 7; ++i) kron += kWk[i] * (fv[i] + fv[14 - i]);
    double gauss = kWg[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

    PanelResult r;
    r.value = kron * h;
    const double diff = std::fabs((kron - gauss) * h);
    // standard QUADPACK-style sharpened error estimate
    r.error = diff;
    if (diff > 0.0) {
        double resabs = 0.0;
        for (int i = 0; i < 7; ++i) resabs += kWk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
        resabs += kWk[7] * std::fabs(fv[7]);
        resabs *= std::fabs(h);
        if (resabs > 0.0) r.error = resabs * std::min(1.0, std::pow(200.0 * diff / resabs, 1.5));
    }
    return r;
}

bool tol_met(double value, double error, double rel_tol) {
    const double scale = std::fabs(value) < 1e-8 ? 1.0 : std::fabs(value);
    return error <= rel_tol * scale;
}

IntegrationResult adaptive(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, int max_intervals) {
    struct Interval {
        double a, b, value, error;
    };
    IntegrationResult out;
    PanelResult whole = gk15(f, a, b, out.evaluations);
    std::vector<Interval> heap{{a, b, whole.value, whole.error}};
    auto cmp = [](const Interval& x, const Interval& y) { return x.error < y.error; };
    std::make_heap(heap.begin(), heap.end(), cmp);

    double total = whole.value, toterr = whole.error;
    while (!tol_met(total, toterr, rel_tol) && static_cast<int>(heap.size()) < max_intervals) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Interval worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at roundoff floor
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), cmp);
            break;
        }
        PanelResult left = gk15(f, worst.a, mid, out.evaluations);
        PanelResult right = gk15(f, mid, worst.b, out.evaluations);
        total += left.value + right.value - worst.value;
        toterr += left.error + right.error - worst.error;
        heap.push_back({worst.a, mid, left.value, left.error});
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back({mid, worst.b, right.value, right.error});
        std::push_heap(heap.begin(), heap.end(), cmp);
    }
    // Re-sum from the panels for a tighter final error (cancellation in updates).
    total = 0.0;
    toterr = 0.0;
    for (const auto& iv : heap) {
        total += iv.value;
        toterr += iv.error;
    }
    out.value = total;
    out.error_estimate = toterr;
    out.converged = tol_met(total, toterr, rel_tol);
    return out;
}

}  // namespace

IntegrationResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                               double rel_tol, int max_intervals) {
    if (!(rel_tol > 1e-14 && rel_tol < 1e-2))
        throw std::invalid_argument("integrate_1d: rel_tol must be in (1e-14, 1e-2)");
    if (std::isinf(b)) {
        // t = a + u/(1-u), dt = du/(1-u)^2, u in (0,1)
        auto g = [&f, a](double u) {
            const double om = 1.0 - u;
            const double t = a + u / om;
            return f(t) / (om * om);
        };
        return adaptive(g, 0.0, 1.0, rel_tol, max_intervals);
    }
    if (a == b) {
        IntegrationResult r;
        r.converged = true;
        return r;
    }
    return adaptive(f, a, b, rel_tol, max_intervals);
}

IntegrationResult integrate_arcsine(const std::function<double(double)>& f, double theta,
                                    double rel_tol, int max_intervals) {
    if (!(theta > 0.0)) throw std::invalid_argument("integrate_arcsine: theta must be > 0");
    auto g = [&f, theta](double phi) { return f(theta * std::sin(phi)); };
    const double half_pi = 1.5707963267948966;
    return integrate_1d(g, -half_pi, half_pi, rel_tol, max_intervals);
}

IntegrationResult integrate_mc(const std::function<double(const std::vector<double>&)>& f,
                               const std::function<McSample()>& sampler, std::uint64_t n) {
    if (n < 1000) throw std::invalid_argument("integrate_mc: need n >= 1000");
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        McSample s = sampler();
        if (!std::isfinite(s.weight))
            throw std::runtime_error("integrate_mc: sampler produced non-finite weight (zero-density point?)");
        const double y = s.weight * f(s.x);
        const double delta = y - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (y - mean);
    }
    IntegrationResult out;
    out.value = mean;
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    out.error_estimate = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
    out.evaluations = n;
    out.converged = true;
    return out;
}

}  // namespace latmin
