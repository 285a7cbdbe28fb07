#include "qfm/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace qfm::theory {

ObservableScalars scalars_for(const Observable& obs) {
    ObservableScalars s;
    s.d = double(obs.dim());
    s.trace = obs.trace();
    s.norm2_sq = obs.norm2_sq();
    s.norm_inf = obs.norm_inf();
    s.norm1 = obs.norm1();
    s.c2 = obs.abs_entry_sum() * obs.abs_entry_sum() / (s.d * s.d);
    return s;
}

double c1_constant(const ObservableScalars& s) {
    double d = s.d;
    return (d * s.norm2_sq - s.trace * s.trace) / (d * (d * d - 1.0));
}

double mean_2design(const ObservableScalars& s, bool omega_zero) {
    return omega_zero ? s.trace / s.d : 0.0;
}

VarResult var_2design_single(const ObservableScalars& s, u128 redundancy, bool omega_zero) {
    double d = s.d;
    double r = u128_to_double(redundancy);
    double v = c1_constant(s) * r / (d * (d + 1.0));
    if (omega_zero)
        v += (s.trace * s.trace - d * s.norm2_sq) / (d * d * (d * d - 1.0));
    VarResult out;
    out.raw = v;
    out.value = omega_zero ? std::max(0.0, v) : v;
    out.approximate = omega_zero;
    return out;
}

VarResult var_2design_reuploading(const ObservableScalars& s, const std::vector<u128>& partial,
                                  bool omega_zero) {
    if (partial.empty())
        throw std::invalid_argument("var_2design_reuploading: need partial redundancies R_j^L");
    std::size_t big_l = partial.size();
    if (big_l == 1) return var_2design_single(s, partial[0], omega_zero);

    double d = s.d;
    double dd1 = d * d - 1.0;
    double bracket =
        (u128_to_double(partial[0]) - u128_to_double(partial[1])) /
        (d * (d + 1.0) * std::pow(dd1, double(big_l) - 1.0));
    for (std::size_t j = 3; j <= big_l; ++j)
        bracket += u128_to_double(partial[j - 1]) /
                   (d * std::pow(dd1, double(big_l) - double(j) + 2.0));
    double v = c1_constant(s) * bracket;
    if (omega_zero)
        v += (s.trace * s.trace - d * s.norm2_sq) / (d * d * dd1);
    VarResult out;
    out.raw = v;
    out.value = omega_zero ? std::max(0.0, v) : v;
    out.approximate = true;  // the source derivation is approximate for L > 1
    return out;
}

EpsNorm parse_eps_norm(const std::string& name) {
    if (name == "diamond") return EpsNorm::Diamond;
    if (name == "spectral") return EpsNorm::Spectral;
    if (name == "monomial") return EpsNorm::Monomial;
    throw std::invalid_argument("unknown epsilon norm '" + name +
                                "' (expected diamond, spectral, or monomial)");
}

double q_polynomial(EpsNorm norm, const ObservableScalars& s, double eps, u128 redundancy) {
    if (eps < 0) throw std::invalid_argument("q_polynomial: eps must be nonnegative");
    double d = s.d;
    double r = u128_to_double(redundancy);
    double c1 = c1_constant(s);
    switch (norm) {
        case EpsNorm::Diamond:
            return c1 * eps + s.norm1 * s.norm1 * eps * eps +
                   s.norm_inf * s.norm_inf * r * eps / (d * (d + 1.0));
        case EpsNorm::Spectral:
            return (c1 + s.norm2_sq / (d * (d + 1.0))) * eps * std::sqrt(r) +
                   s.norm2_sq * eps * eps * r;
        case EpsNorm::Monomial:
            return (c1 / (d * d) + s.c2 / (d * (d + 1.0))) * eps * r +
                   (s.c2 / (d * d)) * (eps * r) * (eps * r);
    }
    return 0.0;
}

double bound_approx_2design(EpsNorm norm, const ObservableScalars& s, double eps,
                            u128 redundancy, bool omega_zero) {
    return var_2design_single(s, redundancy, omega_zero).value +
           q_polynomial(norm, s, eps, redundancy);
}

double bound_model_variance(const ObservableScalars& s, double eps_m) {
    if (eps_m < 0) throw std::invalid_argument("bound_model_variance: eps must be nonnegative");
    return s.norm2_sq / (s.d * s.d) + s.norm2_sq * eps_m;
}

double bound_local_2design(LocalCase c, int m, int L2, double r_or_norm2sq, u128 r_ek) {
    if (m < 1 || L2 < 0) throw std::invalid_argument("bound_local_2design: need m >= 1, L2 >= 0");
    double dm = std::pow(2.0, m);
    double r = u128_to_double(r_ek);
    double prefactor = std::pow(2.0 * dm / (dm * dm - 1.0), 2.0 * L2);
    switch (c) {
        case LocalCase::BoundedNorm:
            if (r_or_norm2sq > dm)
                throw std::invalid_argument(
                    "bound_local_2design: bounded_norm case needs ||O_hat||_2^2 <= 2^m");
            return prefactor * r * r;
        case LocalCase::Projector: {
            double rank = r_or_norm2sq;
            if (rank < 1 || rank > dm)
                throw std::invalid_argument("bound_local_2design: projector rank out of range");
            return prefactor * (rank / dm) * (rank / dm) * r * r;
        }
    }
    return 0.0;
}

double var_2design_lightcone(int m, int L1, int L2, double tr_o, double tr_o2, u128 r_ek) {
    if (m < 1 || L1 < 1 || L2 < 1)
        throw std::invalid_argument("var_2design_lightcone: need m >= 1, L1 >= 1, L2 >= 1");
    double dm = std::pow(2.0, m);
    double denom = dm * (std::pow(2.0, double(m) * double(L1 + L2 - 1)) + 1.0) *
                   (std::pow(2.0, 2.0 * double(m) * double(L2)) - 1.0);
    return (tr_o2 - tr_o * tr_o / dm) / denom * u128_to_double(r_ek);
}

double alpha_coefficient(const ObservableScalars& s) {
    return c1_constant(s) * s.d * s.d / (s.d + 1.0);
}

double var_2design_alpha(const ObservableScalars& s, double normalized_redundancy) {
    return alpha_coefficient(s) * normalized_redundancy / s.d;
}

}  // namespace qfm::theory
