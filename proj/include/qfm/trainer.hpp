#pragma once

#include <cstdint>
#include <vector>

#include "qfm/fourier.hpp"

namespace qfm::trainer {

enum class Optimizer { Adam, Sgd };

// Target: offset + amplitude * cos(omega_t x), with omega_t given as an
// integer lattice key. The offset keeps the target reachable by projector
// observables, whose models satisfy f >= 0.
struct TrainConfig {
    long long target_key = 1;
    double amplitude = 0.25;
    double offset = 0.4;
    int grid_points = 0;  // 0 = Nyquist size 2*max_key + 1; smaller is rejected
    int epochs = 300;
    double lr = 0.05;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;
    int snapshot_period = 50;
};

struct TrainTrace {
    std::vector<double> loss;  // size epochs + 1; loss[0] is the initial MSE
    std::vector<int> snapshot_epochs;
    std::vector<fourier::CoefficientSet> snapshots;
    std::vector<double> final_theta;
    double grad_check_dev = 0;  // parameter-shift vs finite-difference at start
};

// Full-batch gradient descent on the MSE over the sampling grid. Uses an
// amplitude fast path (two statevector sweeps + FFT per evaluation) when the
// circuit is the L = 1 layered shape with a global |0><0| observable and no
// Haar gates; otherwise falls back to simulator.gradient per grid point.
// Deterministic given the seed. Throws if target_key has zero redundancy,
// naming the nearest in-spectrum frequencies.
TrainTrace train(const circuit::Circuit& c, const Observable& obs, const TrainConfig& cfg);

// Coefficient snapshots for an externally recorded theta history.
std::vector<fourier::CoefficientSet> coefficient_trace(const circuit::Circuit& c,
                                                       const Observable& obs,
                                                       const std::vector<std::vector<double>>& history);

}  // namespace qfm::trainer
