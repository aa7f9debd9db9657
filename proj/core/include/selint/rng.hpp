#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace selint {

/// Philox4x32-10 counter-based generator. The stream is a pure function of
/// (key, counter), so replications can be generated in any order or on any
/// thread and still reproduce bit-for-bit.
class Philox {
 public:
  explicit Philox(std::uint64_t key, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  double cauchy() noexcept;

  // Pareto type I on [1, inf) with density alpha v^(-alpha-1).
  double pareto(double alpha) noexcept;

 private:
  std::array<std::uint32_t, 4> block() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t hash_label(std::string_view label) noexcept;

// Seed for replication `rep` of the cell identified by `label`.
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view label, std::uint64_t rep) noexcept;

}  // namespace selint
