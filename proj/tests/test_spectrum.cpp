#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <numeric>

#include "qfm/spectrum.hpp"

using namespace qfm;
using namespace qfm::spectrum;

namespace {

u128 binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    u128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * u128(n - k + i) / u128(i);
    return r;
}

// Brute-force oracle: enumerate every eigenvalue path pair of the full spec
// and count frequencies directly. Valid for d^{2L} up to ~1e6.
std::map<long long, u128> brute_force_redundancy(const EncodingSpec& spec) {
    // frequency of one path = sum over layers of (eig of chosen index)
    std::vector<std::vector<double>> layer_sums;
    for (const auto& layer : spec.layers) {
        std::vector<double> sums{0.0};
        for (const auto& block : layer.blocks) {
            std::vector<double> next;
            next.reserve(sums.size() * block.eigs.size());
            for (double s : sums)
                for (double e : block.eigs) next.push_back(s + e);
            sums = std::move(next);
        }
        layer_sums.push_back(std::move(sums));
    }
    std::vector<double> path{0.0};
    for (const auto& sums : layer_sums) {
        std::vector<double> next;
        next.reserve(path.size() * sums.size());
        for (double p : path)
            for (double s : sums) next.push_back(p + s);
        path = std::move(next);
    }
    std::map<long long, u128> counts;
    for (double a : path)
        for (double b : path) {
            double key = (a - b) * spec.freq_scale;
            counts[(long long)std::llround(key)] += 1;
        }
    return counts;
}

void check_invariants(const EncodingSpec& spec, const RedundancyTable& t) {
    u128 total = 0;
    for (const auto& [w, c] : t.entries) {
        total += c;
        CHECK(t.count(-w) == c);  // symmetry
    }
    int L = spec.num_layers();
    u128 d = spec.dim();
    u128 d2L = 1;
    for (int i = 0; i < 2 * L; ++i) d2L *= d;
    CHECK(total == d2L);
    CHECK(t.total_paths == d2L);
    u128 dL = 1;
    for (int i = 0; i < L; ++i) dL *= d;
    CHECK(t.count(0) >= dL);
}

}  // namespace

TEST_CASE("pauli single qubit layer table") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 1, 1);
    auto t = full_redundancy(spec);
    CHECK(t.entries.size() == 3);
    CHECK(t.count(-1) == 1);
    CHECK(t.count(0) == 2);
    CHECK(t.count(1) == 1);
    check_invariants(spec, t);
}

TEST_CASE("pauli binomial redundancy for n <= 6, L <= 3") {
    for (int n = 1; n <= 6; ++n)
        for (int L = 1; L <= 3; ++L) {
            auto spec = build_encoding(EncodingStrategy::Pauli, n, L);
            auto t = full_redundancy(spec);
            int nL = n * L;
            CHECK(t.max_lattice_freq() == nL);
            for (long long k = -nL; k <= nL; ++k)
                CHECK(t.count(k) == binom(2 * nL, nL - int(std::abs(k))));
            check_invariants(spec, t);
        }
}

TEST_CASE("two pauli qubits, one layer") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 2, 1);
    auto t = full_redundancy(spec);
    std::map<long long, u128> want{{-2, 1}, {-1, 4}, {0, 6}, {1, 4}, {2, 1}};
    CHECK(t.entries == want);
}

TEST_CASE("exponential spectrum is 3^{nL} consecutive integers") {
    for (int n = 1; n <= 3; ++n)
        for (int L = 1; L <= 2; ++L) {
            if (n * L > 5) continue;
            auto spec = build_encoding(EncodingStrategy::Exponential, n, L);
            auto t = full_redundancy(spec);
            long long wmax = 1;
            for (int i = 0; i < n * L; ++i) wmax *= 3;
            wmax = (wmax - 1) / 2;
            CHECK((long long)t.entries.size() == 2 * wmax + 1);
            CHECK(t.max_lattice_freq() == wmax);
            for (long long w = -wmax; w <= wmax; ++w) CHECK(t.count(w) > 0);
            check_invariants(spec, t);
        }
}

TEST_CASE("exponential n=2 L=1 per-qubit convolution") {
    auto spec = build_encoding(EncodingStrategy::Exponential, 2, 1);
    auto a = layer_spectrum({{spec.layers[0].blocks[0]}}, spec.lattice_scale, spec.freq_scale);
    auto b = layer_spectrum({{spec.layers[0].blocks[1]}}, spec.lattice_scale, spec.freq_scale);
    CHECK(a.entries == std::map<long long, u128>{{-1, 1}, {0, 2}, {1, 1}});
    CHECK(b.entries == std::map<long long, u128>{{-3, 1}, {0, 2}, {3, 1}});
    auto t = compose(a, b);
    std::map<long long, u128> want{{-4, 1}, {-3, 2}, {-2, 1}, {-1, 2}, {0, 4},
                                   {1, 2},  {2, 1},  {3, 2},  {4, 1}};
    CHECK(t.entries == want);
}

TEST_CASE("golomb tables: R = 1 off zero") {
    for (int n = 1; n <= 5; ++n) {
        auto spec = build_encoding(EncodingStrategy::Golomb, n, 1);
        auto t = full_redundancy(spec);
        u128 d = spec.dim();
        CHECK(t.count(0) == d);
        std::size_t dd = std::size_t(d);
        CHECK(t.entries.size() == dd * (dd - 1) + 1);  // 2 C(d,2) + 1
        for (const auto& [w, c] : t.entries)
            if (w != 0) CHECK(c == 1);
        check_invariants(spec, t);
    }
}

TEST_CASE("golomb rejects L > 1") {
    CHECK_THROWS(build_encoding(EncodingStrategy::Golomb, 2, 2));
}

TEST_CASE("sidon sequence property") {
    auto marks = sidon_sequence(32);
    CHECK(marks[0] == 0);
    std::map<long long, int> diffs;
    for (std::size_t i = 0; i < marks.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) diffs[marks[i] - marks[j]] += 1;
    for (const auto& [d, c] : diffs) CHECK(c == 1);
}

TEST_CASE("compose identities") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 1, 1);
    auto q = layer_spectrum(spec.layers[0], spec.lattice_scale, spec.freq_scale);
    auto t = compose(q, q);
    CHECK(t.entries == std::map<long long, u128>{{-2, 1}, {-1, 4}, {0, 6}, {1, 4}, {2, 1}});

    RedundancyTable point;
    point.lattice_scale = q.lattice_scale;
    point.entries[0] = 4;
    point.total_paths = 4;
    auto scaled = compose(q, point);
    for (const auto& [w, c] : q.entries) CHECK(scaled.count(w) == c * 4);
}

TEST_CASE("compose is commutative and associative") {
    auto e = build_encoding(EncodingStrategy::Exponential, 3, 1);
    auto a = layer_spectrum({{e.layers[0].blocks[0]}}, e.lattice_scale, e.freq_scale);
    auto b = layer_spectrum({{e.layers[0].blocks[1]}}, e.lattice_scale, e.freq_scale);
    auto c = layer_spectrum({{e.layers[0].blocks[2]}}, e.lattice_scale, e.freq_scale);
    CHECK(compose(a, b).entries == compose(b, a).entries);
    CHECK(compose(compose(a, b), c).entries == compose(a, compose(b, c)).entries);
}

TEST_CASE("compose rejects lattice mismatch") {
    RedundancyTable a, b;
    a.lattice_scale = 1.0;
    b.lattice_scale = 2.0;
    a.entries[0] = a.total_paths = 1;
    b.entries[0] = b.total_paths = 1;
    CHECK_THROWS(compose(a, b));
}

TEST_CASE("full_redundancy equals brute force when d^2L <= 1e6") {
    std::vector<EncodingSpec> specs;
    specs.push_back(build_encoding(EncodingStrategy::Pauli, 2, 2));
    specs.push_back(build_encoding(EncodingStrategy::Pauli, 3, 1));
    specs.push_back(build_encoding(EncodingStrategy::Exponential, 2, 2));
    specs.push_back(build_encoding(EncodingStrategy::Golomb, 3, 1));
    std::vector<std::vector<double>> eigs{{0.0, 0.25, 1.0, 1.5}};
    specs.push_back(build_encoding(EncodingStrategy::Custom, 2, 1, &eigs, 4.0));
    for (const auto& spec : specs) {
        auto t = full_redundancy(spec);
        CHECK(t.entries == brute_force_redundancy(spec));
    }
}

TEST_CASE("partial redundancy") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 1, 2);
    auto p22 = partial_redundancy(spec, 2, 2);
    CHECK(p22.table.count(0) == 2);
    auto p12 = partial_redundancy(spec, 1, 2);
    CHECK(p12.table.count(0) == 6);
    CHECK(p12.table.entries == full_redundancy(spec).entries);
    auto l1 = layer_spectrum(spec.layers[0], spec.lattice_scale, spec.freq_scale);
    CHECK(partial_redundancy(spec, 1, 1).table.entries == l1.entries);
    CHECK_THROWS(partial_redundancy(spec, 2, 1));
    CHECK_THROWS(partial_redundancy(spec, 0, 1));
    CHECK_THROWS(partial_redundancy(spec, 1, 3));
}

TEST_CASE("sequential parallel equivalence") {
    CHECK(sequential_parallel_check(build_encoding(EncodingStrategy::Pauli, 1, 2)));
    CHECK(sequential_parallel_check(build_encoding(EncodingStrategy::Exponential, 1, 2)));
    CHECK(sequential_parallel_check(build_encoding(EncodingStrategy::Pauli, 2, 3)));
    CHECK(sequential_parallel_check(build_encoding(EncodingStrategy::Golomb, 2, 1)));

    // cross-check the lemma itself: sequential pauli n=1 L=2 equals pauli n=2 L=1
    auto seq = full_redundancy(build_encoding(EncodingStrategy::Pauli, 1, 2));
    auto par = full_redundancy(build_encoding(EncodingStrategy::Pauli, 2, 1));
    CHECK(seq.entries == par.entries);
}

TEST_CASE("custom encoding validation") {
    std::vector<std::vector<double>> bad{{0.0, 1.0, 2.0}};
    CHECK_THROWS(build_encoding(EncodingStrategy::Custom, 2, 1, &bad, 1.0));
    CHECK_THROWS(build_encoding(EncodingStrategy::Custom, 2, 1, nullptr, 1.0));
    std::vector<std::vector<double>> off_lattice{{0.0, 0.333333333, 1.0, 2.0}};
    auto spec = build_encoding(EncodingStrategy::Custom, 2, 1, &off_lattice, 1.0);
    CHECK_THROWS_WITH_AS(full_redundancy(spec), doctest::Contains("lattice"),
                         std::invalid_argument);
}

TEST_CASE("overflow-safe counts at n=4 L=4") {
    auto spec = build_encoding(EncodingStrategy::Pauli, 4, 4);
    auto t = full_redundancy(spec);
    // d^{2L} = 2^{128/4*...}: 2^{2*4*4} = 2^32 paths; go bigger: n=4 L=4 -> 2^32
    u128 total = 0;
    for (const auto& [w, c] : t.entries) total += c;
    CHECK(total == pow_u128(2, 32));
    CHECK(format_u128(total) == "4294967296");
}
