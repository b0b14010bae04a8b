#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace substrum::kernels {

enum class Isa { Scalar, Avx2, Avx512 };

std::string_view name(Isa isa);
/// Compiled in and supported by the running CPU.
bool supported(Isa isa);
std::vector<Isa> supported_isas();

/// Kernel used by the estimator: the best supported ISA, unless overridden by
/// set_active or the SUBSTRUM_KERNEL environment variable (scalar, avx2, avx512).
Isa active();
/// Throws Error when the ISA is not supported.
void set_active(Isa isa);

/// popcount(a[i] & b[i]) summed over i < words.
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
std::uint64_t and_popcount(Isa isa, const std::uint64_t* a, const std::uint64_t* b, std::size_t words);

namespace detail {
std::uint64_t and_popcount_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
#ifdef SUBSTRUM_HAVE_X86_KERNELS
std::uint64_t and_popcount_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
std::uint64_t and_popcount_avx512(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
#endif
}  // namespace detail

}  // namespace substrum::kernels
