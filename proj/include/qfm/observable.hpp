#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qfm/numeric.hpp"

namespace qfm {

enum class ObservableKind {
    GlobalZeroProjector,   // |0...0><0...0|
    LocalZeroAverage,      // (1/n) sum_j |0><0|_j (x) 1
    LocalSiteProjector,    // rank-r projector on a fixed qubit subset, identity elsewhere
    CustomHermitian,       // dense matrix, small n only
};

// Hermitian observable with the scalar quantities the closed-form variance
// expressions consume. Diagonal kinds never materialize the dense matrix.
class Observable {
  public:
    static Observable global_zero_projector(int n);
    static Observable local_zero_average(int n);
    // Projects onto the first `rank` basis states of `site_qubits` (identity
    // on the rest).
    static Observable local_site_projector(int n, std::vector<int> site_qubits, int rank);
    static Observable custom_hermitian(int n, Eigen::MatrixXcd dense);

    ObservableKind kind() const { return kind_; }
    int n_qubits() const { return n_; }
    std::size_t dim() const { return std::size_t(1) << n_; }

    double trace() const { return trace_; }
    double norm2_sq() const { return norm2_sq_; }   // ||O||_2^2 = Tr[O^2]
    double norm_inf() const { return norm_inf_; }   // largest |eigenvalue|
    double norm1() const { return norm1_; }         // sum |eigenvalue|
    double abs_entry_sum() const { return abs_entry_sum_; }  // sum_{ij} |O_ij|

    double min_eig() const { return min_eig_; }
    double max_eig() const { return max_eig_; }

    bool is_diagonal() const { return kind_ != ObservableKind::CustomHermitian || diag_.has_value(); }

    // <psi|O|psi> for a 2^n statevector.
    double expectation(const std::vector<cx>& amplitudes) const;

    // Dense 2^n x 2^n matrix (small n; used by tests and custom kind).
    Eigen::MatrixXcd dense() const;

    // Rescale by a positive factor (used by homogeneity tests).
    Observable scaled(double factor) const;

    const std::vector<int>& site_qubits() const { return site_qubits_; }
    int rank() const { return rank_; }

  private:
    Observable() = default;
    void finalize_from_dense(const Eigen::MatrixXcd& m);

    ObservableKind kind_ = ObservableKind::GlobalZeroProjector;
    int n_ = 0;
    std::vector<int> site_qubits_;
    int rank_ = 0;
    double scale_ = 1.0;
    std::optional<Eigen::MatrixXcd> dense_;
    std::optional<Eigen::VectorXd> diag_;

    double trace_ = 0, norm2_sq_ = 0, norm_inf_ = 0, norm1_ = 0, abs_entry_sum_ = 0;
    double min_eig_ = 0, max_eig_ = 0;
};

}  // namespace qfm
