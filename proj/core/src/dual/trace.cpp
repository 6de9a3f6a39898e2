#include "uzawa/dual/trace.hpp"

#include <stdexcept>
#include <string>

namespace uzawa {

const PriceSignal& DualTrace::price_at(std::size_t k) const {
  if (k == iterations) return final_price;
  if (k > iterations || thinning == 0 || k % thinning != 0 || k / thinning >= iterates.size()) {
    throw std::out_of_range("dual trace: price of iteration " + std::to_string(k) + " not stored");
  }
  return iterates[k / thinning].lambda;
}

}  // namespace uzawa
