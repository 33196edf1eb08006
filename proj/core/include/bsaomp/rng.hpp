#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "bsaomp/types.hpp"

namespace bsaomp {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a master seed and a tuple of
/// counters (trial, user, stream tag, ...). Each counter is folded in with a
/// splitmix64 finalizer, so the result depends only on the values and their
/// order, never on which thread asks or when.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters);

Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> counters);

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
cplx complex_normal(Rng& rng, double variance = 1.0);

}  // namespace bsaomp
