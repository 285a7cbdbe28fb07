#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qfm/fourier.hpp"

using namespace qfm;
using namespace qfm::circuit;
using namespace qfm::fourier;
using spectrum::EncodingStrategy;
using spectrum::build_encoding;

namespace {

Circuit single_qubit_x_encoding() {
    Circuit c;
    c.n_qubits = 1;
    c.encoding = build_encoding(EncodingStrategy::Pauli, 1, 1);
    c.freq_scale = 1.0;
    c.max_key = 1;
    Block b;
    b.type = BlockType::Encoding;
    b.qubits = {0};
    b.gates.push_back({GateKind::H, {0}});
    b.gates.push_back({GateKind::Encoding, {0}, -1, -1, {-0.5, 0.5}});
    b.gates.push_back({GateKind::H, {0}});
    c.blocks.push_back(std::move(b));
    return c;
}

std::vector<double> random_theta(const Circuit& c, Rng& rng) {
    std::vector<double> t(std::size_t(c.param_count));
    for (auto& v : t) v = rng.uniform(0, 2 * std::numbers::pi);
    return t;
}

}  // namespace

TEST_CASE("cos^2(x/2) coefficients") {
    auto c = single_qubit_x_encoding();
    auto cs = extract_coefficients(c, {}, Observable::global_zero_projector(1));
    CHECK(std::abs(cs.at(0) - cx(0.5, 0)) <= 1e-12);
    CHECK(std::abs(cs.at(1) - cx(0.25, 0)) <= 1e-12);
    CHECK(std::abs(cs.at(-1) - cx(0.25, 0)) <= 1e-12);

    auto report = norm_bound_check(cs, Observable::global_zero_projector(1));
    CHECK(report.sum_sq == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
    CHECK(report.bound == doctest::Approx(1.0));
    CHECK(report.pass);
}

TEST_CASE("constant model has only c_0") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 2, 1);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 1);
    auto obs = Observable::custom_hermitian(2, 0.7 * Eigen::MatrixXcd::Identity(4, 4));
    Rng rng(4);
    auto theta = random_theta(c, rng);
    auto cs = extract_coefficients(c, theta, obs);
    CHECK(std::abs(cs.at(0) - cx(0.7, 0)) <= 1e-12);
    for (const auto& [k, v] : cs.coeffs)
        if (k != 0) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("conjugate symmetry and round trip") {
    auto spec = build_encoding(EncodingStrategy::Golomb, 2, 1);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 2);
    auto obs = Observable::local_zero_average(2);
    Rng rng(17);
    auto theta = random_theta(c, rng);
    auto cs = extract_coefficients(c, theta, obs);
    for (const auto& [k, v] : cs.coeffs) CHECK(std::abs(v - std::conj(cs.at(-k))) <= 1e-10);

    auto grid = reconstruct_grid(cs);
    double period = 2.0 * std::numbers::pi * cs.freq_scale;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double x = period * double(k) / double(grid.size());
        CHECK(std::abs(grid[k] - sim::evaluate(c, theta, x, obs)) <= 1e-10);
    }
}

TEST_CASE("zero-redundancy frequencies carry no weight") {
    // golomb d=4 marks {0,1,3,7}: key 5 is not a pairwise difference
    auto spec = build_encoding(EncodingStrategy::Golomb, 2, 1);
    auto t = spectrum::full_redundancy(spec);
    CHECK(t.count(5) == 0);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 2);
    auto obs = Observable::global_zero_projector(2);
    for (int trial = 0; trial < 200; ++trial) {
        Rng rng(900 + std::uint64_t(trial));
        auto theta = random_theta(c, rng);
        auto cs = extract_coefficients(c, theta, obs);
        for (const auto& [k, v] : cs.coeffs)
            if (t.count(k) == 0) CHECK(std::abs(v) <= 1e-10);
    }
}

TEST_CASE("built-in encodings: support matches the redundancy table") {
    struct Case {
        EncodingStrategy s;
        int n, L;
    };
    for (auto [s, n, L] : {Case{EncodingStrategy::Pauli, 3, 1}, Case{EncodingStrategy::Pauli, 2, 2},
                           Case{EncodingStrategy::Exponential, 2, 1},
                           Case{EncodingStrategy::Golomb, 3, 1}}) {
        auto spec = build_encoding(s, n, L);
        auto t = spectrum::full_redundancy(spec);
        auto c = build_model_circuit(spec, AnsatzKind::SimplifiedTwoDesign, 2);
        auto obs = Observable::global_zero_projector(n);
        for (int trial = 0; trial < 50; ++trial) {
            Rng rng(50 + std::uint64_t(trial));
            auto theta = random_theta(c, rng);
            auto cs = extract_coefficients(c, theta, obs);
            for (const auto& [k, v] : cs.coeffs)
                if (t.count(k) == 0) CHECK(std::abs(v) <= 1e-10);
        }
    }
}

TEST_CASE("brickwise light cone restricts the realized spectrum") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 6, 1);
    BrickwiseLayout lay{6, 2, 1, 1, 0};
    auto c = build_brickwise(lay, spec, {AnsatzKind::HaarBlock, 1});
    auto lc = extract_lightcone(c, lay);
    CHECK(lc.r_ek.max_lattice_freq() == 4);  // cone sees 4 of the 6 qubits
    auto obs = Observable::local_site_projector(6, {0, 1}, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(333 + std::uint64_t(trial));
        sim::HaarAssignment haars = sim::sample_haar_assignment(c, rng);
        auto cs = extract_coefficients(c, {}, obs, &haars);
        for (const auto& [k, v] : cs.coeffs)
            if (lc.r_ek.count(k) == 0) CHECK(std::abs(v) <= 1e-10);
    }
}

TEST_CASE("statistics are reproducible and thread-count independent") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 2, 1);
    auto c = build_model_circuit(spec, AnsatzKind::StronglyEntangling, 1);
    auto obs = Observable::global_zero_projector(2);
    auto a = coefficient_statistics(c, obs, 200, 12345, 1);
    auto b = coefficient_statistics(c, obs, 200, 12345, 3);
    REQUIRE(a.mean.size() == b.mean.size());
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        CHECK(a.mean[i] == b.mean[i]);  // bit-identical
        CHECK(a.mean_abs_sq[i] == b.mean_abs_sq[i]);
        CHECK(a.mean_abs_4th[i] == b.mean_abs_4th[i]);
    }
    auto d = coefficient_statistics(c, obs, 200, 999, 1);
    CHECK(d.mean[a.idx(0)] != a.mean[a.idx(0)]);  // different seed, different stream
}

TEST_CASE("variance matches a two-pass reference on identical samples") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 1, 1);
    auto c = build_model_circuit(spec, AnsatzKind::HaarBlock, 1);
    auto obs = Observable::global_zero_projector(1);
    int samples = 300;
    std::uint64_t seed = 777;
    auto st = coefficient_statistics(c, obs, samples, seed, 2);

    // regenerate the same per-sample coefficients via the documented contract
    std::vector<CoefficientSet> sets;
    for (int i = 0; i < samples; ++i) {
        Rng theta_rng = Rng::for_task(seed, 0, std::uint64_t(i));
        std::vector<double> theta(std::size_t(c.param_count));
        for (auto& t : theta) t = theta_rng.uniform(0, 2 * std::numbers::pi);
        Rng haar_rng = Rng::for_task(seed, 1, std::uint64_t(i));
        auto haars = sim::sample_haar_assignment(c, haar_rng);
        sets.push_back(extract_coefficients(c, theta, obs, &haars));
    }
    for (long long k = -1; k <= 1; ++k) {
        cx mean = 0;
        for (const auto& s : sets) mean += s.at(k);
        mean /= double(samples);
        double var = 0;
        for (const auto& s : sets) var += std::norm(s.at(k) - mean);
        var /= double(samples);
        CHECK(std::abs(st.mean_at(k) - mean) <= 1e-12);
        CHECK(std::abs(st.variance_at(k) - var) <= 1e-12);
    }
}

TEST_CASE("haar 2-design statistics approach the closed form (d = 2)") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 1, 1);
    auto c = build_model_circuit(spec, AnsatzKind::HaarBlock, 1);
    auto obs = Observable::global_zero_projector(1);
    int samples = 40000;
    auto st = coefficient_statistics(c, obs, samples, 2024);
    // exact 2-design values at d=2, O = |0><0|: Var(c_1) = 1/36, E[c_0] = 1/2
    CHECK(std::abs(st.variance_at(1) - 1.0 / 36.0) <= 3 * st.stderr_at(1));
    double se_mean = std::sqrt(st.variance_at(0) / samples);
    CHECK(std::abs(st.mean_at(0) - cx(0.5, 0)) <= 3 * se_mean + 1e-9);
    CHECK(std::abs(st.mean_at(1)) <= 5 * std::sqrt(st.mean_abs_sq[st.idx(1)] / samples) + 1e-9);
}

TEST_CASE("norm bound scales quadratically with the observable") {
    auto c = single_qubit_x_encoding();
    auto obs = Observable::global_zero_projector(1);
    auto cs = extract_coefficients(c, {}, obs);
    auto scaled = obs.scaled(2.0);
    auto cs2 = extract_coefficients(c, {}, scaled);
    auto r2 = norm_bound_check(cs2, scaled);
    CHECK(r2.bound == doctest::Approx(4.0));
    CHECK(r2.sum_sq == doctest::Approx(4.0 * 3.0 / 8.0));
    CHECK(r2.pass);
}
