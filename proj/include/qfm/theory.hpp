#pragma once

#include <string>
#include <vector>

#include "qfm/numeric.hpp"
#include "qfm/observable.hpp"

namespace qfm::theory {

// Scalar inputs of the closed forms: dimension plus observable norms. c2 is
// the monomial-bound constant sum_{l,k} |[O tensor O]_{l,k}| / d^2, which
// factors as (sum_{ij} |O_ij|)^2 / d^2.
struct ObservableScalars {
    double d = 0;
    double trace = 0;
    double norm2_sq = 0;
    double norm_inf = 0;
    double norm1 = 0;
    double c2 = 0;
};

ObservableScalars scalars_for(const Observable& obs);

// C1 = (d ||O||_2^2 - Tr(O)^2) / (d (d^2 - 1))
double c1_constant(const ObservableScalars& s);

// E[c_omega] = Tr(O)/d for omega = 0, else 0.
double mean_2design(const ObservableScalars& s, bool omega_zero);

struct VarResult {
    double value = 0;   // reported value (clamped at 0 for omega = 0)
    double raw = 0;     // formula value before clamping
    bool approximate = false;  // omega = 0 outputs are tagged approximate
};

// Single-layer exact 2-design variance:
//   C1 * R/(d(d+1)) + (Tr^2 - d||O||_2^2)/(d^2(d^2-1)) * delta_omega0
// The omega = 0 value can go negative at small d; it is clamped and flagged.
VarResult var_2design_single(const ObservableScalars& s, u128 redundancy, bool omega_zero);

// Reuploading variance ("approximately equal" in the source derivation):
//   C1 * [ (R_1^L - R_2^L)/(d(d+1)(d^2-1)^{L-1})
//          + sum_{j=3..L} R_j^L/(d(d^2-1)^{L-j+2}) ] + delta-term
// partial takes R_j^L(omega) for j = 1..L; reduces to the single-layer
// formula at L = 1.
VarResult var_2design_reuploading(const ObservableScalars& s, const std::vector<u128>& partial,
                                  bool omega_zero);

enum class EpsNorm { Diamond, Spectral, Monomial };

EpsNorm parse_eps_norm(const std::string& name);

// Q polynomial alone (zero at eps = 0).
double q_polynomial(EpsNorm norm, const ObservableScalars& s, double eps, u128 redundancy);

// Var_2design(omega) + Q(eps, R); monotone in eps and R.
double bound_approx_2design(EpsNorm norm, const ObservableScalars& s, double eps,
                            u128 redundancy, bool omega_zero);

// Model-variance bound: ||O||_2^2/d^2 + ||O||_2^2 * eps_M.
double bound_model_variance(const ObservableScalars& s, double eps_m);

enum class LocalCase { BoundedNorm, Projector };

// Local-2-design bounds for a light cone with L2 post-encoding brick rows of
// width m. bounded_norm case (requires ||O_hat||_2^2 <= 2^m):
//   (2^{m+1}/(2^{2m}-1))^{2 L2} * R_Ek^2
// rank-r projector case: additionally * (r / 2^m)^2.
double bound_local_2design(LocalCase c, int m, int L2, double r_or_norm2sq, u128 r_ek);

// Closed-form light-cone 2-design variance, omega != 0 only:
//   [ (Tr[O_hat^2] - Tr[O_hat]^2/2^m)
//     / (2^m (2^{m(L1+L2-1)} + 1) (2^{2 m L2} - 1)) ] * R_Ek(omega)
double var_2design_lightcone(int m, int L1, int L2, double tr_o, double tr_o2, u128 r_ek);

// Informal alpha-form convenience: Var = alpha * |R~(omega)| / d with
// alpha = C1 d^2 / (d+1), equivalent to the formal single-layer off-zero
// formula. Not used by any test oracle.
double alpha_coefficient(const ObservableScalars& s);
double var_2design_alpha(const ObservableScalars& s, double normalized_redundancy);

}  // namespace qfm::theory
