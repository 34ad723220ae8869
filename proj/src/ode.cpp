#include "mlab/ode.hpp"

namespace mlab {

std::vector<double> uniform_samples(int k, double span) {
    std::vector<double> s(k + 1);
    for (int j = 0; j <= k; ++j) s[j] = span * j / k;
    return s;
}

} // namespace mlab
