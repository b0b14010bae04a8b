#include <atomic>
#include <cstdlib>
#include <string>

#include "substrum/error.hpp"
#include "substrum/kernels.hpp"

namespace substrum::kernels {

namespace {

Isa best_supported() {
  if (supported(Isa::Avx512)) return Isa::Avx512;
  if (supported(Isa::Avx2)) return Isa::Avx2;
  return Isa::Scalar;
}

Isa initial() {
  if (const char* env = std::getenv("SUBSTRUM_KERNEL")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Avx512})
      if (want == name(isa)) {
        if (!supported(isa)) throw Error("SUBSTRUM_KERNEL=" + want + " is not supported on this CPU");
        return isa;
      }
    throw Error("unknown SUBSTRUM_KERNEL value '" + want + "'");
  }
  return best_supported();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Avx512:
      return "avx512";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
#ifdef SUBSTRUM_HAVE_X86_KERNELS
    case Isa::Avx2:
      return __builtin_cpu_supports("avx2");
    case Isa::Avx512:
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512vpopcntdq");
#else
    default:
      return false;
#endif
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Avx512})
    if (supported(isa)) out.push_back(isa);
  return out;
}

Isa active() { return current().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  if (!supported(isa)) throw Error("kernel '" + std::string(name(isa)) + "' is not supported on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

std::uint64_t and_popcount(Isa isa, const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  switch (isa) {
#ifdef SUBSTRUM_HAVE_X86_KERNELS
    case Isa::Avx2:
      return detail::and_popcount_avx2(a, b, words);
    case Isa::Avx512:
      return detail::and_popcount_avx512(a, b, words);
#endif
    default:
      return detail::and_popcount_scalar(a, b, words);
  }
}

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  return and_popcount(active(), a, b, words);
}

}  // namespace substrum::kernels
