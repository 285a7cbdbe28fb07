#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfm/numeric.hpp"

namespace qfm::spectrum {

// One diagonalized encoding Hamiltonian: 2^|qubits| real eigenvalues applied
// as diag(e^{-i x eig_0}, ...) on its qubit support.
struct EncodingBlock {
    std::vector<int> qubits;
    std::vector<double> eigs;
};

struct EncodingLayer {
    std::vector<EncodingBlock> blocks;
};

enum class EncodingStrategy { Pauli, Exponential, Golomb, Custom };

std::string to_string(EncodingStrategy s);

struct EncodingSpec {
    std::vector<EncodingLayer> layers;
    int n_qubits = 0;
    // Multiplying an eigenvalue by lattice_scale gives an integer for the
    // built-in strategies (2 for pauli/exponential, 1 for golomb).
    double lattice_scale = 1.0;
    // Multiplying a physical frequency by freq_scale gives the integer table
    // key. Built-in spectra live on the unit lattice (freq_scale = 1, since
    // eigenvalue differences are integers even when eigenvalues are not);
    // custom spectra inherit the eigenvalue scale.
    double freq_scale = 1.0;
    EncodingStrategy strategy = EncodingStrategy::Custom;

    int num_layers() const { return int(layers.size()); }
    u128 dim() const { return pow_u128(2, unsigned(n_qubits)); }
};

// Exact count of eigenvalue path pairs per integer-lattice frequency.
// Physical frequency = key / lattice_scale; for the built-in strategies the
// keys are the physical frequencies themselves (lattice_scale = 1).
struct RedundancyTable {
    std::map<long long, u128> entries;
    u128 total_paths = 0;
    double lattice_scale = 1.0;
    double cluster_tol = 1e-9;  // tolerance used to snap eigenvalues to the lattice

    u128 count(long long lattice_freq) const {
        auto it = entries.find(lattice_freq);
        return it == entries.end() ? u128(0) : it->second;
    }
    double physical(long long lattice_freq) const { return double(lattice_freq) / lattice_scale; }
    double normalized(long long lattice_freq) const {
        return u128_to_double(count(lattice_freq)) / u128_to_double(total_paths);
    }
    long long max_lattice_freq() const {
        return entries.empty() ? 0 : entries.rbegin()->first;
    }
    std::size_t support_size() const { return entries.size(); }
};

struct PartialRedundancyTable {
    int from_layer = 1;  // 1-based, inclusive
    int to_layer = 1;
    RedundancyTable table;
};

// Eigenvalue lists for the requested strategy. Layer/qubit indices are
// 1-based in the exponential scaling exponent (l-1)*n + (j-1): qubit j of
// layer l scales by 3^{(l-1)n + j-1}, the indexing that produces the
// consecutive-integer spectrum of size 3^{nL}.
EncodingSpec build_encoding(EncodingStrategy strategy, int n, int L,
                            const std::vector<std::vector<double>>* custom_eigs = nullptr,
                            double custom_lattice_scale = 1.0);

// Greedy Sidon sequence (Mian-Chowla style) starting at 0: all pairwise
// differences distinct, any length supported.
std::vector<long long> sidon_sequence(std::size_t count);

// All pairwise eigenvalue-sum differences of one layer, with multiplicity.
// eig_scale snaps eigenvalues to an integer grid; freq_scale maps physical
// frequencies to table keys.
RedundancyTable layer_spectrum(const EncodingLayer& layer, double eig_scale,
                               double freq_scale = 1.0, double tol = 1e-9);

// Discrete convolution of the two count maps; total_paths multiplies.
RedundancyTable compose(const RedundancyTable& a, const RedundancyTable& b);

// Fold of layer_spectrum over all layers. Guard: at most 10^7 distinct
// frequencies may be produced.
RedundancyTable full_redundancy(const EncodingSpec& spec);

PartialRedundancyTable partial_redundancy(const EncodingSpec& spec, int h, int l);

// True iff the L-layer spectrum equals the single-layer spectrum of the same
// blocks placed side by side on nL qubits.
bool sequential_parallel_check(const EncodingSpec& spec);

}  // namespace qfm::spectrum
