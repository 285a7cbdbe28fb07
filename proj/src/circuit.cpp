#include "qfm/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qfm::circuit {

std::string to_string(AnsatzKind k) {
    switch (k) {
        case AnsatzKind::StronglyEntangling: return "strongly_entangling";
        case AnsatzKind::SimplifiedTwoDesign: return "simplified_two_design";
        case AnsatzKind::HaarBlock: return "haar";
    }
    return "?";
}

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Largest integer-lattice frequency reachable by the spec: per layer, the sum
// over blocks of the maximal eigenvalue spread.
long long spectrum_max_key(const spectrum::EncodingSpec& spec) {
    long long total = 0;
    for (const auto& layer : spec.layers) {
        for (const auto& block : layer.blocks) {
            double lo = block.eigs[0], hi = block.eigs[0];
            for (double e : block.eigs) {
                lo = std::min(lo, e);
                hi = std::max(hi, e);
            }
            double key = (hi - lo) * spec.freq_scale;
            long long k = (long long)std::llround(key);
            if (std::abs(key - double(k)) > 1e-9 * std::max(1.0, std::abs(key)))
                throw std::invalid_argument(
                    "circuit: encoding spectrum is not on the integer lattice at scale " +
                    format_double(spec.freq_scale));
            total += k;
        }
    }
    return total;
}

void append_encoding_layer(Circuit& c, const spectrum::EncodingLayer& layer, int row = -1) {
    Block b;
    b.type = BlockType::Encoding;
    b.row = row;
    std::vector<int> support;
    for (const auto& eb : layer.blocks) {
        Gate g;
        g.kind = GateKind::Encoding;
        g.qubits = eb.qubits;
        g.eigs = eb.eigs;
        support.insert(support.end(), eb.qubits.begin(), eb.qubits.end());
        b.gates.push_back(std::move(g));
    }
    b.qubits = sorted_unique(std::move(support));
    c.blocks.push_back(std::move(b));
}

void append_ansatz(Block& block, const std::vector<int>& qubits, AnsatzKind kind, int reps,
                   int& next_param, int& next_haar) {
    switch (kind) {
        case AnsatzKind::StronglyEntangling:
            append_strongly_entangling(block, qubits, reps, next_param);
            break;
        case AnsatzKind::SimplifiedTwoDesign:
            append_simplified_two_design(block, qubits, reps, next_param);
            break;
        case AnsatzKind::HaarBlock:
            append_haar(block, qubits, next_haar);
            break;
    }
}

}  // namespace

void append_strongly_entangling(Block& block, const std::vector<int>& qubits, int reps,
                                int& next_param) {
    int n = int(qubits.size());
    if (n < 1) throw std::invalid_argument("strongly_entangling: empty support");
    if (reps < 1) throw std::invalid_argument("strongly_entangling: need reps >= 1");
    for (int l = 0; l < reps; ++l) {
        for (int q : qubits) {
            block.gates.push_back({GateKind::RZ, {q}, next_param++, -1, {}});
            block.gates.push_back({GateKind::RY, {q}, next_param++, -1, {}});
            block.gates.push_back({GateKind::RZ, {q}, next_param++, -1, {}});
        }
        if (n >= 2) {
            // ranges cycle 1, 2, ..., n-1, 1, ... across sub-layers; this equals
            // "l mod n with 0 mapped to 1" for the first n sub-layers and keeps
            // cycling through every entangler range afterwards
            int r = (l % (n - 1)) + 1;
            for (int j = 0; j < n; ++j)
                block.gates.push_back({GateKind::CNOT, {qubits[j], qubits[(j + r) % n]}, -1, -1, {}});
        }
    }
    block.qubits = sorted_unique(qubits);
}

void append_simplified_two_design(Block& block, const std::vector<int>& qubits, int depth,
                                  int& next_param) {
    int n = int(qubits.size());
    if (n < 1) throw std::invalid_argument("simplified_two_design: empty support");
    if (depth < 0) throw std::invalid_argument("simplified_two_design: need depth >= 0");
    for (int q : qubits) block.gates.push_back({GateKind::RY, {q}, next_param++, -1, {}});
    for (int d = 0; d < depth; ++d) {
        // even pairs (0,1),(2,3),... then odd pairs (1,2),(3,4),...
        for (int start : {0, 1}) {
            for (int j = start; j + 1 < n; j += 2) {
                block.gates.push_back({GateKind::CZ, {qubits[j], qubits[j + 1]}, -1, -1, {}});
                block.gates.push_back({GateKind::RY, {qubits[j]}, next_param++, -1, {}});
                block.gates.push_back({GateKind::RY, {qubits[j + 1]}, next_param++, -1, {}});
            }
        }
    }
    block.qubits = sorted_unique(qubits);
}

void append_haar(Block& block, const std::vector<int>& qubits, int& next_haar) {
    if (qubits.empty()) throw std::invalid_argument("append_haar: empty support");
    Gate g;
    g.kind = GateKind::Haar;
    g.qubits = qubits;
    g.haar = next_haar++;
    block.gates.push_back(std::move(g));
    block.qubits = sorted_unique(qubits);
}

Circuit build_model_circuit(const spectrum::EncodingSpec& spec, AnsatzKind ansatz, int reps) {
    Circuit c;
    c.n_qubits = spec.n_qubits;
    c.encoding = spec;
    c.freq_scale = spec.freq_scale;
    c.max_key = spectrum_max_key(spec);
    std::vector<int> all(spec.n_qubits);
    for (int q = 0; q < spec.n_qubits; ++q) all[q] = q;
    int next_param = 0, next_haar = 0;
    for (int l = 0; l < spec.num_layers() + 1; ++l) {
        Block b;
        b.type = BlockType::Trainable;
        append_ansatz(b, all, ansatz, reps, next_param, next_haar);
        c.blocks.push_back(std::move(b));
        if (l < spec.num_layers()) append_encoding_layer(c, spec.layers[std::size_t(l)]);
    }
    c.param_count = next_param;
    c.haar_count = next_haar;
    return c;
}

namespace {

// Bricks of width m at the given qubit offset, circular.
std::vector<std::vector<int>> brick_grid(int n, int m, int offset) {
    std::vector<std::vector<int>> bricks(std::size_t(n / m));
    for (int b = 0; b < n / m; ++b) {
        bricks[std::size_t(b)].resize(std::size_t(m));
        for (int j = 0; j < m; ++j) bricks[std::size_t(b)][std::size_t(j)] = (offset + b * m + j) % n;
    }
    return bricks;
}

}  // namespace

Circuit build_brickwise(const BrickwiseLayout& layout, const spectrum::EncodingSpec& spec,
                        const BrickAnsatz& ansatz) {
    int n = layout.n, m = layout.m;
    if (n < 1 || m < 1 || n % m != 0)
        throw std::invalid_argument("build_brickwise: need m >= 1 dividing n");
    if (m > 1 && m % 2 != 0)
        throw std::invalid_argument("build_brickwise: odd m > 1 has no half-brick offset; "
                                    "use m = 1 or an even width");
    if (layout.L1 < 0 || layout.L2 < 0)
        throw std::invalid_argument("build_brickwise: need L1, L2 >= 0");
    if (layout.observable_site < 0 || layout.observable_site >= n / m)
        throw std::invalid_argument("build_brickwise: observable site out of range");
    if (spec.num_layers() != 1)
        throw std::invalid_argument("build_brickwise: brickwise models use one encoding layer");
    if (spec.n_qubits != n)
        throw std::invalid_argument("build_brickwise: encoding spec is on " +
                                    std::to_string(spec.n_qubits) + " qubits, layout has " +
                                    std::to_string(n));

    int half = m == 1 ? 0 : m / 2;
    auto enc_bricks = brick_grid(n, m, half);

    // every encoding block must sit inside one encoding brick
    std::vector<std::vector<const spectrum::EncodingBlock*>> brick_blocks(enc_bricks.size());
    for (const auto& eb : spec.layers[0].blocks) {
        int home = -1;
        for (std::size_t b = 0; b < enc_bricks.size(); ++b) {
            bool inside = true;
            for (int q : eb.qubits)
                if (std::find(enc_bricks[b].begin(), enc_bricks[b].end(), q) == enc_bricks[b].end()) {
                    inside = false;
                    break;
                }
            if (inside) {
                home = int(b);
                break;
            }
        }
        if (home < 0)
            throw std::invalid_argument(
                "build_brickwise: encoding block is not aligned to the m-qubit brick grid");
        brick_blocks[std::size_t(home)].push_back(&eb);
    }

    Circuit c;
    c.n_qubits = n;
    c.encoding = spec;
    c.freq_scale = spec.freq_scale;
    c.max_key = spectrum_max_key(spec);
    int next_param = 0, next_haar = 0;
    int row = 0;

    auto add_trainable_row = [&](int offset) {
        for (const auto& brick : brick_grid(n, m, offset)) {
            Block b;
            b.type = BlockType::Trainable;
            b.row = row;
            append_ansatz(b, brick, ansatz.kind, ansatz.reps, next_param, next_haar);
            c.blocks.push_back(std::move(b));
        }
        ++row;
    };

    for (int r = 0; r < layout.L1; ++r) add_trainable_row((r % 2) * half);
    for (std::size_t b = 0; b < enc_bricks.size(); ++b) {
        Block blk;
        blk.type = BlockType::Encoding;
        blk.row = row;
        std::vector<int> support;
        for (const auto* eb : brick_blocks[b]) {
            Gate g;
            g.kind = GateKind::Encoding;
            g.qubits = eb->qubits;
            g.eigs = eb->eigs;
            support.insert(support.end(), eb->qubits.begin(), eb->qubits.end());
            blk.gates.push_back(std::move(g));
        }
        if (blk.gates.empty()) continue;  // brick with no encoding Hamiltonian
        blk.qubits = sorted_unique(std::move(support));
        c.blocks.push_back(std::move(blk));
    }
    ++row;
    for (int r = 0; r < layout.L2; ++r) add_trainable_row((r % 2) * half);

    c.param_count = next_param;
    c.haar_count = next_haar;
    return c;
}

LightCone extract_lightcone(const Circuit& circuit, const BrickwiseLayout& layout) {
    int n = layout.n, m = layout.m;
    if (circuit.n_qubits != n)
        throw std::invalid_argument("extract_lightcone: layout does not match circuit");
    std::set<int> dep;
    for (int j = 0; j < m; ++j) dep.insert(layout.observable_site * m + j);
    std::vector<int> obs_orig(dep.begin(), dep.end());

    std::vector<bool> keep(circuit.blocks.size(), false);
    for (std::size_t i = circuit.blocks.size(); i-- > 0;) {
        const Block& b = circuit.blocks[i];
        bool hits = std::any_of(b.qubits.begin(), b.qubits.end(),
                                [&](int q) { return dep.count(q) > 0; });
        if (hits) {
            keep[i] = true;
            dep.insert(b.qubits.begin(), b.qubits.end());
        }
    }

    LightCone lc;
    lc.support.assign(dep.begin(), dep.end());
    std::vector<int> to_sub(std::size_t(n), -1);
    for (std::size_t i = 0; i < lc.support.size(); ++i) to_sub[std::size_t(lc.support[i])] = int(i);

    std::set<int> enc;
    spectrum::EncodingSpec cone_spec;
    cone_spec.n_qubits = int(lc.support.size());
    cone_spec.lattice_scale = circuit.encoding.lattice_scale;
    cone_spec.freq_scale = circuit.encoding.freq_scale;
    cone_spec.strategy = circuit.encoding.strategy;
    spectrum::EncodingLayer cone_layer;

    Circuit& sub = lc.sub_circuit;
    sub.n_qubits = int(lc.support.size());
    sub.freq_scale = circuit.freq_scale;
    std::vector<int> param_new(std::size_t(circuit.param_count), -1);
    std::vector<int> haar_new(std::size_t(circuit.haar_count), -1);

    for (std::size_t i = 0; i < circuit.blocks.size(); ++i) {
        if (!keep[i]) continue;
        const Block& b = circuit.blocks[i];
        Block nb;
        nb.type = b.type;
        nb.row = b.row;
        for (const Gate& g : b.gates) {
            Gate ng = g;
            for (int& q : ng.qubits) q = to_sub[std::size_t(q)];
            if (g.param >= 0) {
                if (param_new[std::size_t(g.param)] < 0) {
                    param_new[std::size_t(g.param)] = int(lc.param_map.size());
                    lc.param_map.push_back(g.param);
                }
                ng.param = param_new[std::size_t(g.param)];
            }
            if (g.haar >= 0) {
                if (haar_new[std::size_t(g.haar)] < 0) {
                    haar_new[std::size_t(g.haar)] = int(lc.haar_map.size());
                    lc.haar_map.push_back(g.haar);
                }
                ng.haar = haar_new[std::size_t(g.haar)];
            }
            if (g.kind == GateKind::Encoding) {
                enc.insert(g.qubits.begin(), g.qubits.end());
                cone_layer.blocks.push_back({ng.qubits, ng.eigs});
            }
            nb.gates.push_back(std::move(ng));
        }
        for (int q : b.qubits) nb.qubits.push_back(to_sub[std::size_t(q)]);
        std::sort(nb.qubits.begin(), nb.qubits.end());
        sub.blocks.push_back(std::move(nb));
    }
    sub.param_count = int(lc.param_map.size());
    sub.haar_count = int(lc.haar_map.size());

    lc.enc_support.assign(enc.begin(), enc.end());
    std::set_difference(dep.begin(), dep.end(), enc.begin(), enc.end(),
                        std::back_inserter(lc.complement));

    if (cone_layer.blocks.empty()) {
        // constant cone: only the zero frequency, one trivial path pair
        lc.r_ek.lattice_scale = circuit.freq_scale;
        lc.r_ek.entries[0] = 1;
        lc.r_ek.total_paths = 1;
    } else {
        cone_spec.layers.push_back(std::move(cone_layer));
        lc.r_ek = spectrum::full_redundancy(cone_spec);
        sub.encoding = cone_spec;
    }
    sub.max_key = lc.r_ek.max_lattice_freq();

    for (int q : obs_orig) lc.obs_qubits.push_back(to_sub[std::size_t(q)]);
    return lc;
}

}  // namespace qfm::circuit
