#include "qfm/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace qfm::sim {

using circuit::Circuit;
using circuit::Gate;
using circuit::GateKind;

Eigen::MatrixXcd haar_unitary(int dim, Rng& rng) {
    Eigen::MatrixXcd g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cx(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix the phase ambiguity so Q is Haar, not just "some" unitary
    for (int j = 0; j < dim; ++j) {
        cx d = r(j, j);
        cx phase = std::abs(d) > 0 ? d / std::abs(d) : cx(1, 0);
        q.col(j) *= phase;
    }
    return q;
}

HaarAssignment sample_haar_assignment(const Circuit& c, Rng& rng) {
    std::vector<int> dims(std::size_t(c.haar_count), 0);
    for (const auto& b : c.blocks)
        for (const auto& g : b.gates)
            if (g.haar >= 0) dims[std::size_t(g.haar)] = 1 << g.qubits.size();
    HaarAssignment out;
    out.reserve(dims.size());
    for (int d : dims) {
        if (d == 0) throw std::logic_error("sample_haar_assignment: unused haar slot");
        out.push_back(haar_unitary(d, rng));
    }
    return out;
}

namespace {

void apply_1q(std::vector<cx>& psi, int q, const cx m[2][2]) {
    std::size_t bit = std::size_t(1) << q;
    std::size_t n = psi.size();
    for (std::size_t b = 0; b < n; ++b) {
        if (b & bit) continue;
        cx a0 = psi[b], a1 = psi[b | bit];
        psi[b] = m[0][0] * a0 + m[0][1] * a1;
        psi[b | bit] = m[1][0] * a0 + m[1][1] * a1;
    }
}

void apply_gate(std::vector<cx>& psi, const Gate& g, const std::vector<double>& theta, double x,
                const HaarAssignment* haars) {
    switch (g.kind) {
        case GateKind::RX: {
            double h = theta[std::size_t(g.param)] / 2.0;
            cx m[2][2] = {{std::cos(h), cx(0, -std::sin(h))}, {cx(0, -std::sin(h)), std::cos(h)}};
            apply_1q(psi, g.qubits[0], m);
            break;
        }
        case GateKind::RY: {
            double h = theta[std::size_t(g.param)] / 2.0;
            cx m[2][2] = {{std::cos(h), -std::sin(h)}, {std::sin(h), std::cos(h)}};
            apply_1q(psi, g.qubits[0], m);
            break;
        }
        case GateKind::RZ: {
            double h = theta[std::size_t(g.param)] / 2.0;
            cx m[2][2] = {{std::exp(cx(0, -h)), 0}, {0, std::exp(cx(0, h))}};
            apply_1q(psi, g.qubits[0], m);
            break;
        }
        case GateKind::H: {
            double s = 1.0 / std::sqrt(2.0);
            cx m[2][2] = {{s, s}, {s, -s}};
            apply_1q(psi, g.qubits[0], m);
            break;
        }
        case GateKind::CNOT: {
            std::size_t cb = std::size_t(1) << g.qubits[0];
            std::size_t tb = std::size_t(1) << g.qubits[1];
            for (std::size_t b = 0; b < psi.size(); ++b)
                if ((b & cb) && !(b & tb)) std::swap(psi[b], psi[b | tb]);
            break;
        }
        case GateKind::CZ: {
            std::size_t cb = std::size_t(1) << g.qubits[0];
            std::size_t tb = std::size_t(1) << g.qubits[1];
            for (std::size_t b = 0; b < psi.size(); ++b)
                if ((b & cb) && (b & tb)) psi[b] = -psi[b];
            break;
        }
        case GateKind::Encoding: {
            std::vector<cx> phase(g.eigs.size());
            for (std::size_t i = 0; i < g.eigs.size(); ++i) phase[i] = std::exp(cx(0, -x * g.eigs[i]));
            for (std::size_t b = 0; b < psi.size(); ++b) {
                std::size_t idx = 0;
                for (std::size_t i = 0; i < g.qubits.size(); ++i)
                    idx |= ((b >> g.qubits[i]) & 1u) << i;
                psi[b] *= phase[idx];
            }
            break;
        }
        case GateKind::Haar: {
            if (!haars || std::size_t(g.haar) >= haars->size())
                throw std::invalid_argument("simulator: circuit has Haar gates but no assignment");
            const Eigen::MatrixXcd& u = (*haars)[std::size_t(g.haar)];
            std::size_t k = g.qubits.size();
            std::size_t dk = std::size_t(1) << k;
            if (std::size_t(u.rows()) != dk)
                throw std::invalid_argument("simulator: Haar matrix dimension mismatch");
            std::vector<cx> in(dk), out(dk);
            // iterate over all settings of the non-gate qubits
            std::size_t mask = 0;
            for (int q : g.qubits) mask |= std::size_t(1) << q;
            std::size_t n = psi.size();
            for (std::size_t base = 0; base < n; ++base) {
                if (base & mask) continue;
                for (std::size_t s = 0; s < dk; ++s) {
                    std::size_t b = base;
                    for (std::size_t i = 0; i < k; ++i)
                        if ((s >> i) & 1u) b |= std::size_t(1) << g.qubits[i];
                    in[s] = psi[b];
                }
                for (std::size_t r = 0; r < dk; ++r) {
                    cx acc = 0;
                    for (std::size_t s = 0; s < dk; ++s) acc += u(Eigen::Index(r), Eigen::Index(s)) * in[s];
                    out[r] = acc;
                }
                for (std::size_t s = 0; s < dk; ++s) {
                    std::size_t b = base;
                    for (std::size_t i = 0; i < k; ++i)
                        if ((s >> i) & 1u) b |= std::size_t(1) << g.qubits[i];
                    psi[b] = out[s];
                }
            }
            break;
        }
    }
}

}  // namespace

std::vector<cx> run_statevector(const Circuit& c, const std::vector<double>& theta, double x,
                                const HaarAssignment* haars) {
    if (int(theta.size()) != c.param_count)
        throw std::invalid_argument("simulator: got " + std::to_string(theta.size()) +
                                    " parameters, circuit has " + std::to_string(c.param_count) +
                                    " slots");
    std::vector<cx> psi(std::size_t(1) << c.n_qubits, cx(0, 0));
    psi[0] = 1.0;
    for (const auto& b : c.blocks)
        for (const auto& g : b.gates) apply_gate(psi, g, theta, x, haars);
    return psi;
}

double evaluate(const Circuit& c, const std::vector<double>& theta, double x,
                const Observable& obs, const HaarAssignment* haars) {
    if (obs.n_qubits() != c.n_qubits)
        throw std::invalid_argument("simulator: observable qubit count mismatch");
    auto psi = run_statevector(c, theta, x, haars);
    return obs.expectation(psi);
}

std::vector<double> gradient(const Circuit& c, const std::vector<double>& theta, double x,
                             const Observable& obs, const HaarAssignment* haars) {
    for (const auto& b : c.blocks)
        for (const auto& g : b.gates)
            if (g.param >= 0 && g.kind != GateKind::RX && g.kind != GateKind::RY &&
                g.kind != GateKind::RZ)
                throw std::invalid_argument(
                    "simulator: parameter-shift gradient needs Pauli-rotation gates only");
    std::vector<double> grad(theta.size(), 0.0);
    std::vector<double> shifted = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        shifted[i] = theta[i] + std::numbers::pi / 2.0;
        double plus = evaluate(c, shifted, x, obs, haars);
        shifted[i] = theta[i] - std::numbers::pi / 2.0;
        double minus = evaluate(c, shifted, x, obs, haars);
        shifted[i] = theta[i];
        grad[i] = (plus - minus) / 2.0;
    }
    return grad;
}

Eigen::MatrixXcd dense_unitary(const Circuit& c, const std::vector<double>& theta, double x,
                               const HaarAssignment* haars) {
    if (c.n_qubits > 12) throw std::invalid_argument("dense_unitary: n too large");
    std::size_t d = std::size_t(1) << c.n_qubits;
    Eigen::MatrixXcd u{Eigen::Index(d), Eigen::Index(d)};
    for (std::size_t col = 0; col < d; ++col) {
        std::vector<cx> psi(d, cx(0, 0));
        psi[col] = 1.0;
        for (const auto& b : c.blocks)
            for (const auto& g : b.gates) apply_gate(psi, g, theta, x, haars);
        for (std::size_t r = 0; r < d; ++r) u(Eigen::Index(r), Eigen::Index(col)) = psi[r];
    }
    return u;
}

}  // namespace qfm::sim
