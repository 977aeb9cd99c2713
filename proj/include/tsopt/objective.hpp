#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tsopt {

// A differentiable scalar objective. Both callables must accept vectors of
// length dim; gradient returns a vector of the same length.
struct Objective {
  std::size_t dim = 0;
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

}  // namespace tsopt
