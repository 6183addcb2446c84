/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace xbarsim {

/// Deterministic random stream. All randomness in a run flows from one
/// top-level seed through streams derived by name, so that subsystems
/// (tile init, forward noise, pulse trains, ...) consume independent
/// sequences and stay reproducible regardless of each other's call counts.
class RngStream {
public:
  explicit RngStream(uint64_t seed);

  /// New independent stream keyed on this stream's base seed and a name.
  /// Derivation depends only on the base seed, not on values drawn so far.
  RngStream derive(std::string_view name) const;
  RngStream derive(std::string_view name, uint64_t index) const;

  uint64_t base_seed() const { return seed_; }

  double uniform();            // [0, 1)
  double gauss();              // N(0, 1), Box-Muller
  bool bernoulli(double p);
  uint64_t next_u64();

private:
  uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace xbarsim
