#ifndef FGL_GRADCHECK_HPP
#define FGL_GRADCHECK_HPP

#include <functional>
#include <vector>

namespace fgl::nn {

/// Central finite differences against an analytic gradient. For each
/// coordinate i, fd_i = (f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps); the
/// returned value is max_i |fd_i - analytic_i| / max(|fd_i|, |analytic_i|, 1e-8).
/// f must be a pure function of x and return finite values.
double gradient_check(const std::function<double(const std::vector<float>&)>& f,
                      std::vector<float> x, const std::vector<float>& analytic_grad,
                      float epsilon);

}  // namespace fgl::nn

#endif
