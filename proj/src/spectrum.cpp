#include "qfm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qfm::spectrum {

std::string to_string(EncodingStrategy s) {
    switch (s) {
        case EncodingStrategy::Pauli: return "pauli";
        case EncodingStrategy::Exponential: return "exponential";
        case EncodingStrategy::Golomb: return "golomb";
        case EncodingStrategy::Custom: return "custom";
    }
    return "?";
}

std::vector<long long> sidon_sequence(std::size_t count) {
    std::vector<long long> marks;
    std::set<long long> diffs;
    long long candidate = 0;
    while (marks.size() < count) {
        bool ok = true;
        std::vector<long long> new_diffs;
        for (long long m : marks) {
            long long d = candidate - m;
            if (diffs.count(d)) {
                ok = false;
                break;
            }
            new_diffs.push_back(d);
        }
        if (ok) {
            // candidate's own differences must also be mutually distinct
            std::set<long long> nd(new_diffs.begin(), new_diffs.end());
            if (nd.size() == new_diffs.size()) {
                marks.push_back(candidate);
                diffs.insert(nd.begin(), nd.end());
            }
        }
        ++candidate;
    }
    return marks;
}

EncodingSpec build_encoding(EncodingStrategy strategy, int n, int L,
                            const std::vector<std::vector<double>>* custom_eigs,
                            double custom_lattice_scale) {
    if (n < 1) throw std::invalid_argument("build_encoding: need n >= 1");
    if (L < 1) throw std::invalid_argument("build_encoding: need L >= 1");

    EncodingSpec spec;
    spec.n_qubits = n;
    spec.strategy = strategy;

    switch (strategy) {
        case EncodingStrategy::Pauli: {
            spec.lattice_scale = 2.0;
            for (int l = 0; l < L; ++l) {
                EncodingLayer layer;
                for (int j = 0; j < n; ++j)
                    layer.blocks.push_back({{j}, {-0.5, 0.5}});
                spec.layers.push_back(std::move(layer));
            }
            break;
        }
        case EncodingStrategy::Exponential: {
            spec.lattice_scale = 2.0;
            for (int l = 0; l < L; ++l) {
                EncodingLayer layer;
                for (int j = 0; j < n; ++j) {
                    double s = std::pow(3.0, double(l) * n + j);
                    layer.blocks.push_back({{j}, {-s / 2.0, s / 2.0}});
                }
                spec.layers.push_back(std::move(layer));
            }
            break;
        }
        case EncodingStrategy::Golomb: {
            if (L != 1)
                throw std::invalid_argument(
                    "build_encoding: golomb requires L = 1 (non-degeneracy holds only "
                    "single-layer)");
            spec.lattice_scale = 1.0;
            std::size_t d = std::size_t(1) << n;
            auto marks = sidon_sequence(d);
            EncodingBlock block;
            block.qubits.resize(n);
            for (int j = 0; j < n; ++j) block.qubits[j] = j;
            block.eigs.assign(marks.begin(), marks.end());
            EncodingLayer layer;
            layer.blocks.push_back(std::move(block));
            spec.layers.push_back(std::move(layer));
            break;
        }
        case EncodingStrategy::Custom: {
            if (!custom_eigs)
                throw std::invalid_argument("build_encoding: custom strategy needs eigenvalues");
            spec.lattice_scale = custom_lattice_scale;
            spec.freq_scale = custom_lattice_scale;
            // One list per layer; each list covers all n qubits as one block.
            for (int l = 0; l < L; ++l) {
                const auto& eigs = custom_eigs->at(std::size_t(l));
                if (eigs.size() != (std::size_t(1) << n))
                    throw std::invalid_argument(
                        "build_encoding: custom layer " + std::to_string(l + 1) + " has " +
                        std::to_string(eigs.size()) + " eigenvalues, expected 2^n = " +
                        std::to_string(std::size_t(1) << n));
                EncodingBlock block;
                block.qubits.resize(n);
                for (int j = 0; j < n; ++j) block.qubits[j] = j;
                block.eigs = eigs;
                EncodingLayer layer;
                layer.blocks.push_back(std::move(block));
                spec.layers.push_back(std::move(layer));
            }
            break;
        }
    }
    return spec;
}

namespace {

long long snap_to_lattice(double value, double scale, double tol) {
    double scaled = value * scale;
    double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > tol * std::max(1.0, std::abs(scaled)))
        throw std::invalid_argument(
            "spectrum: eigenvalue " + format_double(value) +
            " is not on the integer lattice at scale " + format_double(scale) +
            "; choose a lattice_scale (or widen the clustering tolerance) so all "
            "eigenvalues become integers");
    return (long long)(rounded);
}

// Difference table of a single block: all ordered eigenvalue pairs.
// Eigenvalues snap to the 1/eig_scale grid; a difference (e_a - e_b) in
// physical units is then re-expressed on the 1/freq_scale key grid, which
// must also be exact (built-in eigenvalue differences are integers, so
// freq_scale = 1 works even though eigenvalues are half-integers).
RedundancyTable block_spectrum(const EncodingBlock& block, double eig_scale, double freq_scale,
                               double tol) {
    RedundancyTable t;
    t.lattice_scale = freq_scale;
    t.cluster_tol = tol;
    std::vector<long long> lat(block.eigs.size());
    for (std::size_t i = 0; i < block.eigs.size(); ++i)
        lat[i] = snap_to_lattice(block.eigs[i], eig_scale, tol);
    double ratio = freq_scale / eig_scale;
    for (long long a : lat)
        for (long long b : lat) {
            double key = double(a - b) * ratio;
            long long k = (long long)std::llround(key);
            if (std::abs(key - double(k)) > tol * std::max(1.0, std::abs(key)))
                throw std::invalid_argument(
                    "spectrum: frequency " + format_double(double(a - b) / eig_scale) +
                    " is not on the integer lattice at scale " + format_double(freq_scale) +
                    "; choose a lattice_scale (or widen the clustering tolerance) so all "
                    "frequencies become integers");
            t.entries[k] += 1;
        }
    t.total_paths = u128(lat.size()) * u128(lat.size());
    return t;
}

}  // namespace

RedundancyTable compose(const RedundancyTable& a, const RedundancyTable& b) {
    if (a.lattice_scale != b.lattice_scale)
        throw std::invalid_argument("compose: lattice scales differ (" +
                                    format_double(a.lattice_scale) + " vs " +
                                    format_double(b.lattice_scale) + ")");
    RedundancyTable out;
    out.lattice_scale = a.lattice_scale;
    out.cluster_tol = std::max(a.cluster_tol, b.cluster_tol);
    for (const auto& [fa, ca] : a.entries)
        for (const auto& [fb, cb] : b.entries) out.entries[fa + fb] += ca * cb;
    out.total_paths = a.total_paths * b.total_paths;
    if (out.entries.size() > 10'000'000)
        throw std::runtime_error("compose: spectrum support " +
                                 std::to_string(out.entries.size()) +
                                 " exceeds the 10^7 guard");
    return out;
}

RedundancyTable layer_spectrum(const EncodingLayer& layer, double eig_scale, double freq_scale,
                               double tol) {
    if (layer.blocks.empty()) throw std::invalid_argument("layer_spectrum: empty layer");
    RedundancyTable acc = block_spectrum(layer.blocks[0], eig_scale, freq_scale, tol);
    for (std::size_t i = 1; i < layer.blocks.size(); ++i)
        acc = compose(acc, block_spectrum(layer.blocks[i], eig_scale, freq_scale, tol));
    return acc;
}

RedundancyTable full_redundancy(const EncodingSpec& spec) {
    if (spec.layers.empty()) throw std::invalid_argument("full_redundancy: no layers");
    RedundancyTable acc = layer_spectrum(spec.layers[0], spec.lattice_scale, spec.freq_scale);
    for (std::size_t l = 1; l < spec.layers.size(); ++l)
        acc = compose(acc, layer_spectrum(spec.layers[l], spec.lattice_scale, spec.freq_scale));
    return acc;
}

PartialRedundancyTable partial_redundancy(const EncodingSpec& spec, int h, int l) {
    if (h < 1 || l > spec.num_layers() || h > l)
        throw std::invalid_argument("partial_redundancy: need 1 <= h <= l <= L, got h=" +
                                    std::to_string(h) + " l=" + std::to_string(l) +
                                    " L=" + std::to_string(spec.num_layers()));
    RedundancyTable acc =
        layer_spectrum(spec.layers[std::size_t(h - 1)], spec.lattice_scale, spec.freq_scale);
    for (int i = h; i < l; ++i)
        acc = compose(acc,
                      layer_spectrum(spec.layers[std::size_t(i)], spec.lattice_scale, spec.freq_scale));
    return PartialRedundancyTable{h, l, std::move(acc)};
}

bool sequential_parallel_check(const EncodingSpec& spec) {
    RedundancyTable sequential = full_redundancy(spec);

    EncodingSpec parallel;
    parallel.n_qubits = spec.n_qubits * spec.num_layers();
    parallel.lattice_scale = spec.lattice_scale;
    parallel.freq_scale = spec.freq_scale;
    EncodingLayer merged;
    for (int l = 0; l < spec.num_layers(); ++l)
        for (const auto& block : spec.layers[std::size_t(l)].blocks) {
            EncodingBlock shifted = block;
            for (int& q : shifted.qubits) q += l * spec.n_qubits;
            merged.blocks.push_back(std::move(shifted));
        }
    parallel.layers.push_back(std::move(merged));

    RedundancyTable side_by_side = full_redundancy(parallel);
    return sequential.entries == side_by_side.entries &&
           sequential.total_paths == side_by_side.total_paths;
}

}  // namespace qfm::spectrum
