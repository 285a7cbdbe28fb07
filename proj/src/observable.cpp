#include "qfm/observable.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qfm {

namespace {

int popcount_zero_bits(std::size_t basis_index, int n) {
    int zeros = 0;
    for (int q = 0; q < n; ++q)
        if (((basis_index >> q) & 1u) == 0) ++zeros;
    return zeros;
}

}  // namespace

Observable Observable::global_zero_projector(int n) {
    if (n < 1) throw std::invalid_argument("global_zero_projector: need n >= 1");
    Observable o;
    o.kind_ = ObservableKind::GlobalZeroProjector;
    o.n_ = n;
    o.trace_ = 1.0;
    o.norm2_sq_ = 1.0;
    o.norm_inf_ = 1.0;
    o.norm1_ = 1.0;
    o.abs_entry_sum_ = 1.0;
    o.min_eig_ = 0.0;
    o.max_eig_ = 1.0;
    return o;
}

Observable Observable::local_zero_average(int n) {
    if (n < 1) throw std::invalid_argument("local_zero_average: need n >= 1");
    Observable o;
    o.kind_ = ObservableKind::LocalZeroAverage;
    o.n_ = n;
    double dn = double(n);
    double d = double(std::size_t(1) << n);
    // eigenvalue on |b> is z(b)/n with z = number of zero bits
    o.trace_ = d / 2.0;                        // sum z(b) = n 2^{n-1}
    o.norm2_sq_ = d * (1.0 + dn) / (4.0 * dn); // sum z^2 = 2^n (n + n^2)/4
    o.norm_inf_ = 1.0;
    o.norm1_ = o.trace_;
    o.abs_entry_sum_ = o.trace_;
    o.min_eig_ = 0.0;
    o.max_eig_ = 1.0;
    return o;
}

Observable Observable::local_site_projector(int n, std::vector<int> site_qubits, int rank) {
    if (n < 1) throw std::invalid_argument("local_site_projector: need n >= 1");
    if (site_qubits.empty() || int(site_qubits.size()) > n)
        throw std::invalid_argument("local_site_projector: site must be a nonempty qubit subset");
    for (int q : site_qubits)
        if (q < 0 || q >= n)
            throw std::invalid_argument("local_site_projector: qubit index out of range");
    std::size_t site_dim = std::size_t(1) << site_qubits.size();
    if (rank < 1 || std::size_t(rank) > site_dim)
        throw std::invalid_argument("local_site_projector: rank must be in [1, 2^m]");
    Observable o;
    o.kind_ = ObservableKind::LocalSiteProjector;
    o.n_ = n;
    o.site_qubits_ = std::move(site_qubits);
    o.rank_ = rank;
    double rest = double(std::size_t(1) << (n - int(o.site_qubits_.size())));
    o.trace_ = double(rank) * rest;
    o.norm2_sq_ = o.trace_;
    o.norm_inf_ = 1.0;
    o.norm1_ = o.trace_;
    o.abs_entry_sum_ = o.trace_;
    o.min_eig_ = 0.0;
    o.max_eig_ = 1.0;
    return o;
}

Observable Observable::custom_hermitian(int n, Eigen::MatrixXcd dense) {
    if (n < 1 || n > 12) throw std::invalid_argument("custom_hermitian: need 1 <= n <= 12");
    std::size_t d = std::size_t(1) << n;
    if (std::size_t(dense.rows()) != d || std::size_t(dense.cols()) != d)
        throw std::invalid_argument("custom_hermitian: matrix must be 2^n x 2^n");
    double asym = (dense - dense.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(1.0, dense.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("custom_hermitian: matrix is not Hermitian");
    Observable o;
    o.kind_ = ObservableKind::CustomHermitian;
    o.n_ = n;
    o.finalize_from_dense(dense);
    o.dense_ = std::move(dense);
    // remember a purely diagonal matrix so expectation stays cheap
    if (o.dense_->cwiseAbs().sum() - o.dense_->diagonal().cwiseAbs().sum() < 1e-14)
        o.diag_ = o.dense_->diagonal().real();
    return o;
}

void Observable::finalize_from_dense(const Eigen::MatrixXcd& m) {
    trace_ = m.trace().real();
    norm2_sq_ = m.squaredNorm();
    abs_entry_sum_ = m.cwiseAbs().sum();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    norm_inf_ = ev.cwiseAbs().maxCoeff();
    norm1_ = ev.cwiseAbs().sum();
    min_eig_ = ev.minCoeff();
    max_eig_ = ev.maxCoeff();
}

double Observable::expectation(const std::vector<cx>& amplitudes) const {
    std::size_t d = dim();
    if (amplitudes.size() != d)
        throw std::invalid_argument("expectation: statevector dimension mismatch");
    switch (kind_) {
        case ObservableKind::GlobalZeroProjector:
            return std::norm(amplitudes[0]);
        case ObservableKind::LocalZeroAverage: {
            double acc = 0.0;
            for (std::size_t b = 0; b < d; ++b)
                acc += std::norm(amplitudes[b]) * popcount_zero_bits(b, n_);
            return acc / double(n_);
        }
        case ObservableKind::LocalSiteProjector: {
            double acc = 0.0;
            for (std::size_t b = 0; b < d; ++b) {
                std::size_t site = 0;
                for (std::size_t i = 0; i < site_qubits_.size(); ++i)
                    site |= ((b >> site_qubits_[i]) & 1u) << i;
                if (site < std::size_t(rank_)) acc += std::norm(amplitudes[b]);
            }
            return acc;
        }
        case ObservableKind::CustomHermitian: {
            if (diag_) {
                double acc = 0.0;
                for (std::size_t b = 0; b < d; ++b) acc += std::norm(amplitudes[b]) * (*diag_)[b];
                return acc;
            }
            Eigen::Map<const Eigen::VectorXcd> psi(amplitudes.data(), Eigen::Index(d));
            return (psi.adjoint() * (*dense_) * psi)(0, 0).real();
        }
    }
    return 0.0;
}

Eigen::MatrixXcd Observable::dense() const {
    std::size_t d = dim();
    if (kind_ == ObservableKind::CustomHermitian) return *dense_;
    if (n_ > 14) throw std::runtime_error("Observable::dense: dimension too large");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index(d), Eigen::Index(d));
    for (std::size_t b = 0; b < d; ++b) {
        double w = 0.0;
        switch (kind_) {
            case ObservableKind::GlobalZeroProjector:
                w = b == 0 ? 1.0 : 0.0;
                break;
            case ObservableKind::LocalZeroAverage:
                w = popcount_zero_bits(b, n_) / double(n_);
                break;
            case ObservableKind::LocalSiteProjector: {
                std::size_t site = 0;
                for (std::size_t i = 0; i < site_qubits_.size(); ++i)
                    site |= ((b >> site_qubits_[i]) & 1u) << i;
                w = site < std::size_t(rank_) ? 1.0 : 0.0;
                break;
            }
            case ObservableKind::CustomHermitian:
                break;
        }
        m(Eigen::Index(b), Eigen::Index(b)) = w;
    }
    return m;
}

Observable Observable::scaled(double factor) const {
    if (factor <= 0.0) throw std::invalid_argument("Observable::scaled: factor must be positive");
    return custom_hermitian(n_, factor * dense());
}

}  // namespace qfm
