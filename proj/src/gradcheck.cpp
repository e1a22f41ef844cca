#include "fgl/gradcheck.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fgl::nn {

double gradient_check(const std::function<double(const std::vector<float>&)>& f,
                      std::vector<float> x, const std::vector<float>& analytic_grad,
                      float epsilon) {
    if (epsilon <= 0.0f)
        throw std::invalid_argument("gradient_check: epsilon must be positive");
    if (x.size() != analytic_grad.size())
        throw std::invalid_argument("gradient_check: " + std::to_string(x.size()) +
                                    " coordinates vs " +
                                    std::to_string(analytic_grad.size()) +
                                    " analytic gradient entries");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const float saved = x[i];
        x[i] = saved + epsilon;
        const double f_plus = f(x);
        x[i] = saved - epsilon;
        const double f_minus = f(x);
        x[i] = saved;
        if (!std::isfinite(f_plus) || !std::isfinite(f_minus))
            throw std::runtime_error("gradient_check: non-finite f at coordinate " +
                                     std::to_string(i));
        const double fd = (f_plus - f_minus) / (2.0 * static_cast<double>(epsilon));
        const double an = analytic_grad[i];
        const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-8});
        worst = std::max(worst, std::fabs(fd - an) / denom);
    }
    return worst;
}

}  // namespace fgl::nn
