#include "signalflow/parallel.hpp"

#include <cstdlib>
#include <string>

namespace signalflow {

std::size_t worker_count() {
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SIGNALFLOW_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return std::min<std::size_t>(static_cast<std::size_t>(v), hw);
    } catch (...) {
    }
  }
  return hw;
}

}  // namespace signalflow
