// SPDX-License-Identifier: Apache-2.0
#include "sardet/tensor.hpp"

namespace sardet {

Param::Param(std::string name_, std::vector<int> shape_) : name(std::move(name_)), shape(std::move(shape_)) {
  std::int64_t total = 1;
  for (int d : shape) {
    if (d < 1) throw shape_error("Param " + name + ": non-positive dim");
    total *= d;
  }
  data.assign(static_cast<size_t>(total), 0.0f);
  grad.assign(static_cast<size_t>(total), 0.0f);
}

}  // namespace sardet
