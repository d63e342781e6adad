#pragma once

#include <functional>
#include <vector>

namespace renormlab {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// max |g| on n equally spaced points of [a, b], endpoints included
double sampled_max(const std::function<double(double)>& g, double a, double b, int n);

// Sup-norm estimate from 129 and 257 samples with one Richardson step, never below the finer sample.
double sup_norm(const std::function<double(double)>& g, double a, double b);

}  // namespace renormlab
