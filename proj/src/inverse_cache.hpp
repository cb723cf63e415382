#pragma once

#include <memory>
#include <mutex>

namespace vpb::kinetic {

struct InverseFactor;

struct InverseCache {
  std::mutex lock;
  std::shared_ptr<const InverseFactor> L, N;
};

}  // namespace vpb::kinetic
