#include <atomic>
#include <cstdlib>
#include <cstring>

#include "flda/kernels.hpp"

namespace flda::kernels {
namespace {

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("FLDA_SIMD"); env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) {
      return &scalar_table();
    }
    if (std::strcmp(env, "avx2") == 0 && avx2_table() != nullptr) {
      return avx2_table();
    }
  }
  if (const KernelTable* wide = avx2_table(); wide != nullptr) {
    return wide;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

const KernelTable* lookup(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return &scalar_table();
    case Backend::avx2:
      return avx2_table();
  }
  return nullptr;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

bool available(Backend backend) noexcept { return lookup(backend) != nullptr; }

bool select(Backend backend) noexcept {
  const KernelTable* table = lookup(backend);
  if (table == nullptr) {
    return false;
  }
  slot().store(table, std::memory_order_relaxed);
  return true;
}

std::string_view to_string(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace flda::kernels
