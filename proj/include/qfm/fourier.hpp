#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qfm/observable.hpp"
#include "qfm/simulator.hpp"

namespace qfm::fourier {

// Fourier coefficients of one model instance on the integer frequency
// lattice: f(x) = sum_key c[key] e^{i (key/freq_scale) x}.
struct CoefficientSet {
    std::map<long long, cx> coeffs;
    int n_points = 0;         // DFT size N = 2*max_key + 1
    double freq_scale = 1.0;  // physical frequency = key / freq_scale

    cx at(long long key) const {
        auto it = coeffs.find(key);
        return it == coeffs.end() ? cx(0, 0) : it->second;
    }
    double physical(long long key) const { return double(key) / freq_scale; }
    double sum_abs_sq() const {
        double s = 0;
        for (const auto& [k, c] : coeffs) s += std::norm(c);
        return s;
    }
};

// In-place forward DFT (no normalization) through the shared plan cache.
void forward_dft(std::vector<cx>& data);

// Nyquist-rate sampling x_k = 2 pi freq_scale k / N followed by a forward
// DFT with 1/N normalization. Guarded to N <= 1.1e6 (exponential nL <= 12).
CoefficientSet extract_coefficients(const circuit::Circuit& c, const std::vector<double>& theta,
                                    const Observable& obs,
                                    const sim::HaarAssignment* haars = nullptr);

// f on the sampling grid from its coefficients (round-trip check).
std::vector<double> reconstruct_grid(const CoefficientSet& cs);

// Per-frequency Monte-Carlo statistics of c_omega(theta) over i.i.d. theta
// uniform on [0, 2pi) (and fresh Haar blocks, when the circuit has them).
// Sample i draws theta from Rng::for_task(seed, 0, i) and Haar matrices from
// Rng::for_task(seed, 1, i); this is the reproducibility contract.
struct CoefficientStats {
    long long max_key = 0;
    double freq_scale = 1.0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<cx> mean;              // index key + max_key
    std::vector<double> mean_abs_sq;
    std::vector<double> mean_abs_4th;  // E|c|^4, for standard errors

    std::size_t idx(long long key) const { return std::size_t(key + max_key); }
    cx mean_at(long long key) const { return mean[idx(key)]; }
    // Var(c) := E|c|^2 - |E c|^2 (sum of real and imaginary variances)
    double variance_at(long long key) const {
        return mean_abs_sq[idx(key)] - std::norm(mean[idx(key)]);
    }
    // standard error of the variance estimate (dominant E|c|^2 term)
    double stderr_at(long long key) const {
        double v = mean_abs_4th[idx(key)] - mean_abs_sq[idx(key)] * mean_abs_sq[idx(key)];
        return std::sqrt(std::max(0.0, v) / double(samples));
    }
};

CoefficientStats coefficient_statistics(const circuit::Circuit& c, const Observable& obs,
                                        int samples, std::uint64_t seed, int threads = 0);

struct NormBoundReport {
    double sum_sq = 0;
    double bound = 0;
    bool pass = false;
};

// Fourier norm bound: sum |c_omega|^2 <= ||O||_inf^2.
NormBoundReport norm_bound_check(const CoefficientSet& cs, const Observable& obs);

}  // namespace qfm::fourier
