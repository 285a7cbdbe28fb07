#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qfm/circuit.hpp"
#include "qfm/observable.hpp"
#include "qfm/rng.hpp"

namespace qfm::sim {

// One dense unitary per Haar gate slot of a circuit.
using HaarAssignment = std::vector<Eigen::MatrixXcd>;

// QR of a complex Gaussian matrix with the R-diagonal phase fix; exact Haar
// measure on U(dim).
Eigen::MatrixXcd haar_unitary(int dim, Rng& rng);

HaarAssignment sample_haar_assignment(const circuit::Circuit& c, Rng& rng);

// U(x, theta)|0...0> by per-gate application. Never materializes the full
// unitary; O(2^n) per gate (diagonal blocks) to O(4^k 2^{n-k}) (k-qubit Haar).
std::vector<cx> run_statevector(const circuit::Circuit& c, const std::vector<double>& theta,
                                double x, const HaarAssignment* haars = nullptr);

// f(x, theta) = <0|U† O U|0>
double evaluate(const circuit::Circuit& c, const std::vector<double>& theta, double x,
                const Observable& obs, const HaarAssignment* haars = nullptr);

// Exact parameter-shift gradient: df/dtheta_i = [f(+pi/2 shift) - f(-pi/2)]/2.
// Valid because every parameterized gate is a Pauli rotation.
std::vector<double> gradient(const circuit::Circuit& c, const std::vector<double>& theta,
                             double x, const Observable& obs,
                             const HaarAssignment* haars = nullptr);

// Full 2^n x 2^n matrix, for cross-checks on small n.
Eigen::MatrixXcd dense_unitary(const circuit::Circuit& c, const std::vector<double>& theta,
                               double x, const HaarAssignment* haars = nullptr);

}  // namespace qfm::sim
