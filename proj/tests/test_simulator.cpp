#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qfm/observable.hpp"
#include "qfm/simulator.hpp"

using namespace qfm;
using namespace qfm::circuit;
using spectrum::EncodingStrategy;
using spectrum::build_encoding;

namespace {

// S(x) = e^{-i x sigma_x / 2} on one qubit, via H e^{-i x Z/2} H
Circuit single_qubit_x_encoding() {
    Circuit c;
    c.n_qubits = 1;
    c.encoding = build_encoding(EncodingStrategy::Pauli, 1, 1);
    c.freq_scale = 1.0;
    c.max_key = 1;
    Block b;
    b.qubits = {0};
    b.gates.push_back({GateKind::H, {0}});
    b.gates.push_back({GateKind::Encoding, {0}, -1, -1, {-0.5, 0.5}});
    b.gates.push_back({GateKind::H, {0}});
    b.type = BlockType::Encoding;
    c.blocks.push_back(std::move(b));
    return c;
}

std::vector<double> random_theta(const Circuit& c, Rng& rng) {
    std::vector<double> t(std::size_t(c.param_count));
    for (auto& v : t) v = rng.uniform(0, 2 * std::numbers::pi);
    return t;
}

}  // namespace

TEST_CASE("cos^2(x/2) single-qubit model") {
    auto c = single_qubit_x_encoding();
    auto obs = Observable::global_zero_projector(1);
    for (double x : {0.0, 0.3, 1.1, 2.7, 4.0}) {
        double f = sim::evaluate(c, {}, x, obs);
        CHECK(f == doctest::Approx(std::cos(x / 2) * std::cos(x / 2)).epsilon(1e-12));
    }
}

TEST_CASE("identity ansatz at theta = 0 gives f = 1") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 3, 1);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 2);
    std::vector<double> theta(std::size_t(c.param_count), 0.0);
    CHECK(sim::evaluate(c, theta, 0.0, Observable::global_zero_projector(3)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projector expectation stays in [0, 1]; norm is preserved") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 4, 2);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 2);
    auto obs = Observable::global_zero_projector(4);
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(42 + std::uint64_t(trial));
        auto theta = random_theta(c, rng);
        double x = rng.uniform(0, 2 * std::numbers::pi);
        auto psi = sim::run_statevector(c, theta, x);
        double norm = 0;
        for (auto a : psi) norm += std::norm(a);
        CHECK(std::abs(norm - 1.0) <= 1e-12);
        double f = sim::evaluate(c, theta, x, obs);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("per-gate application equals dense unitary on n <= 3") {
    for (auto kind : {AnsatzKind::StronglyEntangling, AnsatzKind::SimplifiedTwoDesign,
                      AnsatzKind::HaarBlock}) {
        auto spec = build_encoding(EncodingStrategy::Exponential, 3, 1);
        auto c = build_model_circuit(spec, kind, 2);
        Rng rng(5);
        auto theta = random_theta(c, rng);
        auto haars = sim::sample_haar_assignment(c, rng);
        double x = 0.77;
        auto psi = sim::run_statevector(c, theta, x, &haars);
        auto u = sim::dense_unitary(c, theta, x, &haars);
        for (int i = 0; i < 8; ++i) CHECK(std::abs(psi[std::size_t(i)] - u(i, 0)) <= 1e-10);
        auto obs = Observable::local_zero_average(3);
        double via_gates = sim::evaluate(c, theta, x, obs, &haars);
        Eigen::VectorXcd col = u.col(0);
        double via_dense = (col.adjoint() * obs.dense() * col)(0, 0).real();
        CHECK(std::abs(via_gates - via_dense) <= 1e-10);
    }
}

TEST_CASE("haar sampler produces unitaries") {
    Rng rng(11);
    for (int d : {2, 4, 8}) {
        auto u = sim::haar_unitary(d, rng);
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
        CHECK((u.adjoint() * u - id).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("gradient of a single R_Y") {
    Circuit c;
    c.n_qubits = 1;
    c.param_count = 1;
    Block b;
    b.qubits = {0};
    b.gates.push_back({GateKind::RY, {0}, 0});
    c.blocks.push_back(std::move(b));
    auto obs = Observable::global_zero_projector(1);
    for (double t : {0.0, 0.4, 1.3, 3.0}) {
        auto g = sim::gradient(c, {t}, 0.0, obs);
        CHECK(g[0] == doctest::Approx(-std::sin(t) / 2).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches finite differences") {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(100 + std::uint64_t(trial));
        int n = 2 + int(trial % 3);
        auto spec = build_encoding(EncodingStrategy::Pauli, n, 1);
        auto c = build_model_circuit(spec, AnsatzKind::SimplifiedTwoDesign, 1);
        auto obs = Observable::local_zero_average(n);
        auto theta = random_theta(c, rng);
        double x = rng.uniform(0, 2 * std::numbers::pi);
        auto g = sim::gradient(c, theta, x, obs);
        double h = 1e-5;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            auto tp = theta, tm = theta;
            tp[i] += h;
            tm[i] -= h;
            double fd = (sim::evaluate(c, tp, x, obs) - sim::evaluate(c, tm, x, obs)) / (2 * h);
            CHECK(std::abs(g[i] - fd) <= 1e-6);
        }
    }
}

TEST_CASE("identity observable gives zero gradient") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 2, 1);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 1);
    auto obs = Observable::custom_hermitian(2, Eigen::MatrixXcd::Identity(4, 4));
    Rng rng(3);
    auto theta = random_theta(c, rng);
    auto g = sim::gradient(c, theta, 0.5, obs);
    for (double v : g) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("fourier norm bound on f itself") {
    auto spec = build_encoding(EncodingStrategy::Golomb, 2, 1);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 2);
    auto obs = Observable::local_zero_average(2);
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng(55 + std::uint64_t(trial));
        auto theta = random_theta(c, rng);
        double x = rng.uniform(0, 20.0);
        CHECK(std::abs(sim::evaluate(c, theta, x, obs)) <= obs.norm_inf() + 1e-12);
    }
}

TEST_CASE("parameter-length mismatch is rejected") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 2, 1);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 1);
    CHECK_THROWS(sim::evaluate(c, {0.0}, 0.0, Observable::global_zero_projector(2)));
}

TEST_CASE("observable cached scalars match dense recomputation") {
    for (int n = 1; n <= 3; ++n) {
        std::vector<Observable> obs;
        obs.push_back(Observable::global_zero_projector(n));
        obs.push_back(Observable::local_zero_average(n));
        obs.push_back(Observable::local_site_projector(n, {0}, 1));
        if (n >= 2) obs.push_back(Observable::local_site_projector(n, {0, 1}, 3));
        for (const auto& o : obs) {
            auto m = o.dense();
            CHECK(o.trace() == doctest::Approx(m.trace().real()).epsilon(1e-12));
            CHECK(o.norm2_sq() == doctest::Approx(m.squaredNorm()).epsilon(1e-12));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
            CHECK(o.norm_inf() == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()));
            CHECK(o.norm1() == doctest::Approx(es.eigenvalues().cwiseAbs().sum()));
            CHECK(o.abs_entry_sum() == doctest::Approx(m.cwiseAbs().sum()));
        }
    }
}

TEST_CASE("observable expectation agrees with dense form") {
    Rng rng(9);
    int n = 3;
    std::vector<cx> psi(8);
    double norm = 0;
    for (auto& a : psi) {
        a = cx(rng.normal(), rng.normal());
        norm += std::norm(a);
    }
    for (auto& a : psi) a /= std::sqrt(norm);
    Eigen::Map<Eigen::VectorXcd> v(psi.data(), 8);
    for (const auto& o :
         {Observable::global_zero_projector(n), Observable::local_zero_average(n),
          Observable::local_site_projector(n, {1, 2}, 2)}) {
        double direct = o.expectation(psi);
        double dense = (v.adjoint() * o.dense() * v)(0, 0).real();
        CHECK(direct == doctest::Approx(dense).epsilon(1e-12));
    }
}
