#include "renormlab/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace renormlab {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx, sxy += dx * dy, syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    f.points = x.size();
    return f;
}

double sampled_max(const std::function<double(double)>& g, double a, double b, int n) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        double t = n == 1 ? a : a + (b - a) * i / (n - 1);
        m = std::max(m, std::fabs(g(t)));
    }
    return m;
}

double sup_norm(const std::function<double(double)>& g, double a, double b) {
    double s1 = sampled_max(g, a, b, 129);
    double s2 = sampled_max(g, a, b, 257);
    // the grid maximum of a smooth function approaches the sup at second order in the spacing
    return std::max(s2, s2 + (s2 - s1) / 3.0);
}

}  // namespace renormlab
