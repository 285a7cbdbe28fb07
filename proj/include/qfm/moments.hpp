#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "qfm/circuit.hpp"
#include "qfm/numeric.hpp"

namespace qfm::moments {

// Index tuple of a second-moment monomial E[W_{r1 c1} W_{r2 c2} W*_{r3 c3} W*_{r4 c4}].
struct MonomialIndex {
    int r1 = 0, c1 = 0, r2 = 0, c2 = 0, r3 = 0, c3 = 0, r4 = 0, c4 = 0;
};

// Exact Haar value via the two-permutation Weingarten sum with weights
// 1/(d^2-1) and -1/(d(d^2-1)). Always real.
double haar_second_moment_entry(int d, const MonomialIndex& idx);

// A family of unitaries with a deterministic per-index sampler, so any two
// passes over the same (seed, index) range see identical matrices.
struct UnitaryEnsemble {
    int dim = 0;
    std::function<Eigen::MatrixXcd(std::uint64_t seed, std::uint64_t index)> sample;
};

UnitaryEnsemble haar_ensemble(int dim);
UnitaryEnsemble fixed_ensemble(const Eigen::MatrixXcd& u);

// Trainable-block circuit as an ensemble over uniform theta in [0, 2pi)
// (Haar slots, if any, are drawn fresh per index as well). n <= 4 qubits.
UnitaryEnsemble block_ensemble(const circuit::Circuit& block);

struct MomentOptions {
    int batch = 64;        // samples per BLAS rank-update
    int flush_every = 16;  // batches between float->double accumulator flushes
    int row_block = 0;     // >0 forces streaming over Gram row blocks (required at d = 16)
};

struct MomentReport {
    int d = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    double epsilon_m = 0;          // d^2 * max entrywise |empirical - Haar|
    double stderr_ = 0;            // standard error of the argmax entry, same d^2 scale
    MonomialIndex argmax;
    double haar_at_max = 0;
    cx empirical_at_max{};
    bool low_sample_warning = false;  // samples < 1000
};

// Monomial epsilon: scans every second-moment tensor entry (d^8 of them, via
// the pair symmetries of W tensor W) against the Weingarten value. Dense scan
// for d <= 8; at d = 16 a positive row_block streams the Gram in slabs.
MomentReport empirical_epsilon_monomial(const UnitaryEnsemble& ens, int samples,
                                        std::uint64_t seed, const MomentOptions& opts = {});

// Spectral epsilon: largest singular value of the dense d^4 x d^4 difference
// E_Haar[W^{x2} (x) conj(W)^{x2}] - E_emp[...]. d <= 8.
double empirical_epsilon_spectral(const UnitaryEnsemble& ens, int samples, std::uint64_t seed,
                                  const MomentOptions& opts = {});

}  // namespace qfm::moments
