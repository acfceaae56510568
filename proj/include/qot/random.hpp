#pragma once

// Seeded random matrices for tests, property suites and the CLI.

#include <random>

#include "qot/herm.hpp"

namespace qot {

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
ComplexMatrix random_ginibre(Rng& rng, int n);
/// (G + G*) / 2 for a Ginibre G.
ComplexMatrix random_hermitian(Rng& rng, int n);
ComplexMatrix random_traceless_hermitian(Rng& rng, int n);
/// Haar-distributed unitary (QR of a Ginibre matrix, phases fixed).
ComplexMatrix random_unitary(Rng& rng, int n);
/// (1 - mix) W / tr W + mix I / n with W Wishart. The minimum eigenvalue is
/// at least mix / n.
DensityMatrix random_density(Rng& rng, int n, double mix = 0.05);

}  // namespace qot
