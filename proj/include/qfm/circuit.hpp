#pragma once

#include <string>
#include <vector>

#include "qfm/spectrum.hpp"

namespace qfm::circuit {

enum class GateKind {
    RX,        // e^{-i theta X/2}, one parameter slot
    RY,
    RZ,
    H,         // fixed Hadamard (basis changes for non-diagonal encodings)
    CNOT,      // qubits = {control, target}
    CZ,
    Encoding,  // diag(e^{-i x eigs[idx]}) on its qubits; idx bit i <-> qubits[i]
    Haar,      // dense unitary taken from a HaarAssignment slot
};

struct Gate {
    GateKind kind;
    std::vector<int> qubits;
    int param = -1;            // global theta slot (rotations only)
    int haar = -1;             // HaarAssignment slot (Haar gates only)
    std::vector<double> eigs;  // physical eigenvalues (Encoding gates only)
};

enum class BlockType { Trainable, Encoding };

// One structural unit: a full trainable/encoding layer for layered models, or
// a single brick for brickwise models.
struct Block {
    BlockType type = BlockType::Trainable;
    std::vector<Gate> gates;
    std::vector<int> qubits;  // union support, sorted
    int row = -1;             // brick row index (brickwise circuits only)
};

enum class AnsatzKind { StronglyEntangling, SimplifiedTwoDesign, HaarBlock };

std::string to_string(AnsatzKind k);

struct Circuit {
    int n_qubits = 0;
    std::vector<Block> blocks;
    int param_count = 0;
    int haar_count = 0;
    spectrum::EncodingSpec encoding;  // the spec whose layers appear as Encoding blocks
    long long max_key = 0;            // largest integer-lattice frequency of the spectrum
    double freq_scale = 1.0;          // physical frequency = key / freq_scale
};

// Strongly entangling layers: per sub-layer, R_Z R_Y R_Z on every
// qubit followed by a CNOT ring of range r = sub-layer index mod n (r = 0
// mapped to 1). 3 * |qubits| * reps parameters. Single-qubit supports get the
// rotations only.
void append_strongly_entangling(Block& block, const std::vector<int>& qubits, int reps,
                                int& next_param);

// Initial R_Y everywhere, then `depth` rounds of staggered CZ + two R_Y
// pairs; |qubits| + depth * 2 * (|qubits|-1) parameters.
void append_simplified_two_design(Block& block, const std::vector<int>& qubits, int depth,
                                  int& next_param);

void append_haar(Block& block, const std::vector<int>& qubits, int& next_haar);

// W^{L+1} S^L(x) W^L ... S^1(x) W^1: L+1 trainable blocks on all qubits
// interleaving the encoding layers. reps = sub-layer count (SE) or depth
// (simplified two-design); ignored for Haar blocks.
Circuit build_model_circuit(const spectrum::EncodingSpec& spec, AnsatzKind ansatz, int reps);

struct BrickwiseLayout {
    int n = 0;                // total qubits
    int m = 2;                // brick width
    int L1 = 1;               // pre-encoding trainable rows
    int L2 = 1;               // post-encoding trainable rows
    int observable_site = 0;  // brick index k in the offset-0 grid
};

struct BrickAnsatz {
    AnsatzKind kind = AnsatzKind::HaarBlock;
    int reps = 1;
};

// L1 trainable brick rows (offsets alternate 0, m/2, 0, ... in qubits), one
// encoding row at offset m/2, then L2 trainable rows restarting at offset 0.
// Circular wrap. m = 1 degenerates to parallel single wires (all offsets 0);
// odd m > 1 is rejected.
Circuit build_brickwise(const BrickwiseLayout& layout, const spectrum::EncodingSpec& spec,
                        const BrickAnsatz& ansatz);

struct LightCone {
    Circuit sub_circuit;            // on the support qubits, compacted
    std::vector<int> support;       // S_Lk, sorted original indices
    std::vector<int> enc_support;   // S_Ek subset of support
    std::vector<int> complement;    // S_Lk \ S_Ek
    spectrum::RedundancyTable r_ek; // redundancy of the encoding blocks in the cone
    std::vector<int> param_map;     // sub slot -> original slot
    std::vector<int> haar_map;      // sub haar slot -> original haar slot
    std::vector<int> obs_qubits;    // observable brick, sub-circuit indices
};

// Minimal causal cone of the site-k observable brick: reverse sweep keeping
// every block whose support intersects the growing dependency set.
LightCone extract_lightcone(const Circuit& circuit, const BrickwiseLayout& layout);

}  // namespace qfm::circuit
