#ifndef WEYLGLUE_PARAMS_HPP
#define WEYLGLUE_PARAMS_HPP

#include <string>
#include <vector>

#include "tensor.hpp"

namespace weylglue {

// a: shrink scale of the blown-up piece, gamma: inner radius of the
// interpolation annulus, lambda = b / a
struct GluingParams {
  double a = 1e-6;
  double gamma = 0.02;
  double lambda = 1.0;

  double b() const { return lambda * a; }

  void validate() const {
    if (!(a > 0 && a < gamma && gamma < 1)) throw Error("invalid parameters: need 0 < a < gamma < 1");
    if (!(lambda > 0)) throw Error("invalid parameters: need lambda > 0");
  }

  // the construction wants 0 < a << gamma << 1/lambda < 1
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (a > gamma * gamma / 10) w.push_back("regime violated: a > gamma^2/10");
    if (gamma > 1 / (10 * lambda)) w.push_back("regime violated: gamma > 1/(10 lambda)");
    return w;
  }
};

}  // namespace weylglue

#endif
