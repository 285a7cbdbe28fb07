#include "qfm/moments.hpp"

#include <cblas-openblas.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qfm/rng.hpp"
#include "qfm/simulator.hpp"

namespace qfm::moments {

double haar_second_moment_entry(int d, const MonomialIndex& t) {
    if (d < 2) throw std::invalid_argument("haar_second_moment_entry: need d >= 2");
    double dd = double(d);
    double wg_e = 1.0 / (dd * dd - 1.0);
    double wg_s = -1.0 / (dd * (dd * dd - 1.0));
    // row pairing (r1,r2) against (r3,r4), column pairing likewise
    bool re = t.r1 == t.r3 && t.r2 == t.r4;
    bool rs = t.r1 == t.r4 && t.r2 == t.r3;
    bool ce = t.c1 == t.c3 && t.c2 == t.c4;
    bool cs = t.c1 == t.c4 && t.c2 == t.c3;
    return wg_e * ((re && ce) + (rs && cs)) + wg_s * ((re && cs) + (rs && ce));
}

UnitaryEnsemble haar_ensemble(int dim) {
    UnitaryEnsemble e;
    e.dim = dim;
    e.sample = [dim](std::uint64_t seed, std::uint64_t index) {
        Rng rng = Rng::for_task(seed, 1, index);
        return sim::haar_unitary(dim, rng);
    };
    return e;
}

UnitaryEnsemble fixed_ensemble(const Eigen::MatrixXcd& u) {
    if (u.rows() != u.cols()) throw std::invalid_argument("fixed_ensemble: square matrix required");
    UnitaryEnsemble e;
    e.dim = int(u.rows());
    e.sample = [u](std::uint64_t, std::uint64_t) { return u; };
    return e;
}

UnitaryEnsemble block_ensemble(const circuit::Circuit& block) {
    if (block.n_qubits > 4)
        throw std::invalid_argument("block_ensemble: n <= 4 (moment tensors grow as d^8)");
    UnitaryEnsemble e;
    e.dim = 1 << block.n_qubits;
    e.sample = [block](std::uint64_t seed, std::uint64_t index) {
        Rng theta_rng = Rng::for_task(seed, 0, index);
        std::vector<double> theta(std::size_t(block.param_count));
        for (auto& t : theta) t = theta_rng.uniform(0, 2 * std::numbers::pi);
        sim::HaarAssignment haars;
        if (block.haar_count > 0) {
            Rng haar_rng = Rng::for_task(seed, 1, index);
            haars = sim::sample_haar_assignment(block, haar_rng);
        }
        return sim::dense_unitary(block, theta, 0.0, block.haar_count > 0 ? &haars : nullptr);
    };
    return e;
}

namespace {

using cxf = std::complex<float>;

const cxf kOneF{1.0f, 0.0f};

// Symmetric-pair coordinates: v = vec(W (x) W) has v_{(i,j)} = w_i w_j with
// w = row-major vec(W), so only the d^2(d^2+1)/2 unordered pairs i <= j are
// distinct. The Gram E[u u^dagger] over those pairs carries every second-moment
// monomial; the remaining d^8 entries follow from the pair swaps and
// Hermitian conjugation, none of which change |empirical - Haar|.
struct SymIndex {
    int d = 0, d2 = 0, s = 0;
    std::vector<int> pi, pj;  // pair k -> (i, j), i <= j
};

SymIndex make_sym_index(int d) {
    SymIndex sx;
    sx.d = d;
    sx.d2 = d * d;
    for (int i = 0; i < sx.d2; ++i)
        for (int j = i; j < sx.d2; ++j) {
            sx.pi.push_back(i);
            sx.pj.push_back(j);
        }
    sx.s = int(sx.pi.size());
    return sx;
}

MonomialIndex monomial_for(const SymIndex& sx, int k, int l) {
    MonomialIndex t;
    t.r1 = sx.pi[std::size_t(k)] / sx.d;
    t.c1 = sx.pi[std::size_t(k)] % sx.d;
    t.r2 = sx.pj[std::size_t(k)] / sx.d;
    t.c2 = sx.pj[std::size_t(k)] % sx.d;
    t.r3 = sx.pi[std::size_t(l)] / sx.d;
    t.c3 = sx.pi[std::size_t(l)] % sx.d;
    t.r4 = sx.pj[std::size_t(l)] / sx.d;
    t.c4 = sx.pj[std::size_t(l)] % sx.d;
    return t;
}

void fill_pair_column(const SymIndex& sx, const Eigen::MatrixXcd& w, cxf* out) {
    std::vector<cx> flat(std::size_t(sx.d2));
    for (int a = 0; a < sx.d; ++a)
        for (int b = 0; b < sx.d; ++b) flat[std::size_t(a * sx.d + b)] = w(a, b);
    for (int k = 0; k < sx.s; ++k)
        out[k] = cxf(flat[std::size_t(sx.pi[std::size_t(k)])] *
                     flat[std::size_t(sx.pj[std::size_t(k)])]);
}

// Mean Gram E[u u^dagger] over the ensemble, lower triangle, column-major.
// Accumulated in float via BLAS rank updates, flushed into doubles every
// flush_every batches so the float path never sums more than ~1k samples.
std::vector<cx> sym_gram_full(const UnitaryEnsemble& ens, const SymIndex& sx, int samples,
                              std::uint64_t seed, const MomentOptions& opts) {
    std::size_t s = std::size_t(sx.s);
    std::vector<cxf> a(s * std::size_t(opts.batch));
    std::vector<cxf> c(s * s, cxf(0, 0));
    std::vector<cx> gram(s * s, cx(0, 0));
    auto flush = [&]() {
        for (std::size_t col = 0; col < s; ++col)
            for (std::size_t row = col; row < s; ++row)
                gram[row + col * s] += cx(c[row + col * s]);
        std::fill(c.begin(), c.end(), cxf(0, 0));
    };
    int done = 0, batches = 0;
    while (done < samples) {
        int b = std::min(opts.batch, samples - done);
        for (int i = 0; i < b; ++i)
            fill_pair_column(sx, ens.sample(seed, std::uint64_t(done + i)), a.data() + std::size_t(i) * s);
        cblas_cherk(CblasColMajor, CblasLower, CblasNoTrans, sx.s, b, 1.0f, a.data(), sx.s, 1.0f,
                    c.data(), sx.s);
        done += b;
        if (++batches % opts.flush_every == 0) flush();
    }
    flush();
    for (auto& g : gram) g /= double(samples);
    return gram;
}

struct ScanResult {
    double max_dev = 0;
    int k = 0, l = 0;
    cx emp{};
    double haar = 0;
};

void scan_rows(const SymIndex& sx, const cx* rows, int r0, int r1, ScanResult& best,
               bool rows_are_slab) {
    std::size_t lds = std::size_t(sx.s);
    for (int k = r0; k < r1; ++k)
        for (int l = 0; l <= k; ++l) {
            cx emp = rows_are_slab ? rows[std::size_t(k - r0) + std::size_t(l) * std::size_t(r1 - r0)]
                                   : rows[std::size_t(k) + std::size_t(l) * lds];
            double haar = haar_second_moment_entry(sx.d, monomial_for(sx, k, l));
            double dev = std::abs(emp - haar);
            if (dev > best.max_dev) best = {dev, k, l, emp, haar};
        }
}

// Streaming variant: Gram rows in slabs of opts.row_block, samples cached so
// each slab pass reuses the same unitaries. Needed at d = 16 where the full
// Gram does not fit.
ScanResult sym_gram_streamed(const UnitaryEnsemble& ens, const SymIndex& sx, int samples,
                             std::uint64_t seed, const MomentOptions& opts) {
    std::size_t s = std::size_t(sx.s);
    std::vector<Eigen::MatrixXcd> cache;
    cache.reserve(std::size_t(samples));
    for (int i = 0; i < samples; ++i) cache.push_back(ens.sample(seed, std::uint64_t(i)));

    std::vector<cxf> a_full(s * std::size_t(opts.batch));
    ScanResult best;
    for (int r0 = 0; r0 < sx.s; r0 += opts.row_block) {
        int r1 = std::min(sx.s, r0 + opts.row_block);
        std::size_t nb = std::size_t(r1 - r0);
        std::vector<cxf> a_blk(nb * std::size_t(opts.batch));
        std::vector<cxf> c(nb * s, cxf(0, 0));
        std::vector<cx> slab(nb * s, cx(0, 0));
        auto flush = [&]() {
            for (std::size_t idx = 0; idx < nb * s; ++idx) slab[idx] += cx(c[idx]);
            std::fill(c.begin(), c.end(), cxf(0, 0));
        };
        int done = 0, batches = 0;
        while (done < samples) {
            int b = std::min(opts.batch, samples - done);
            for (int i = 0; i < b; ++i) {
                fill_pair_column(sx, cache[std::size_t(done + i)], a_full.data() + std::size_t(i) * s);
                for (std::size_t r = 0; r < nb; ++r)
                    a_blk[r + std::size_t(i) * nb] = a_full[std::size_t(r0) + r + std::size_t(i) * s];
            }
            cblas_cgemm(CblasColMajor, CblasNoTrans, CblasConjTrans, int(nb), sx.s, b, &kOneF,
                        a_blk.data(), int(nb), a_full.data(), sx.s, &kOneF, c.data(), int(nb));
            done += b;
            if (++batches % opts.flush_every == 0) flush();
        }
        flush();
        for (auto& g : slab) g /= double(samples);
        scan_rows(sx, slab.data(), r0, r1, best, true);
    }
    return best;
}

cx monomial_value(const Eigen::MatrixXcd& w, const MonomialIndex& t) {
    return w(t.r1, t.c1) * w(t.r2, t.c2) * std::conj(w(t.r3, t.c3)) * std::conj(w(t.r4, t.c4));
}

}  // namespace

MomentReport empirical_epsilon_monomial(const UnitaryEnsemble& ens, int samples,
                                        std::uint64_t seed, const MomentOptions& opts) {
    if (samples < 1) throw std::invalid_argument("empirical_epsilon_monomial: need samples >= 1");
    if (ens.dim > 16)
        throw std::invalid_argument("empirical_epsilon_monomial: d <= 16 (n <= 4)");
    if (ens.dim > 8 && opts.row_block <= 0)
        throw std::invalid_argument(
            "empirical_epsilon_monomial: d = 16 needs streaming (set opts.row_block)");

    SymIndex sx = make_sym_index(ens.dim);
    ScanResult best;
    if (opts.row_block > 0) {
        best = sym_gram_streamed(ens, sx, samples, seed, opts);
    } else {
        auto gram = sym_gram_full(ens, sx, samples, seed, opts);
        scan_rows(sx, gram.data(), 0, sx.s, best, false);
    }

    MomentReport rep;
    rep.d = ens.dim;
    rep.samples = samples;
    rep.seed = seed;
    rep.argmax = monomial_for(sx, best.k, best.l);
    rep.haar_at_max = best.haar;
    rep.empirical_at_max = best.emp;
    rep.low_sample_warning = samples < 1000;
    double d2 = double(ens.dim) * double(ens.dim);
    rep.epsilon_m = d2 * best.max_dev;

    // second pass at the argmax entry in full double precision
    cx mean(0, 0);
    double mean_sq = 0;
    for (int i = 0; i < samples; ++i) {
        cx m = monomial_value(ens.sample(seed, std::uint64_t(i)), rep.argmax);
        mean += m;
        mean_sq += std::norm(m);
    }
    mean /= double(samples);
    mean_sq /= double(samples);
    double var = std::max(0.0, mean_sq - std::norm(mean));
    rep.stderr_ = d2 * std::sqrt(var / double(samples));
    return rep;
}

double empirical_epsilon_spectral(const UnitaryEnsemble& ens, int samples, std::uint64_t seed,
                                  const MomentOptions& opts) {
    if (ens.dim > 8)
        throw std::invalid_argument("empirical_epsilon_spectral: d <= 8 (dense d^4 x d^4)");
    SymIndex sx = make_sym_index(ens.dim);
    auto gram = sym_gram_full(ens, sx, samples, seed, opts);
    std::size_t s = std::size_t(sx.s);
    auto gram_at = [&](int k, int l) {
        return k >= l ? gram[std::size_t(k) + std::size_t(l) * s]
                      : std::conj(gram[std::size_t(l) + std::size_t(k) * s]);
    };

    int d = sx.d, d2 = sx.d2;
    std::vector<int> pair_of(std::size_t(d2) * std::size_t(d2));
    {
        int k = 0;
        for (int i = 0; i < d2; ++i)
            for (int j = i; j < d2; ++j, ++k) {
                pair_of[std::size_t(i) * std::size_t(d2) + std::size_t(j)] = k;
                pair_of[std::size_t(j) * std::size_t(d2) + std::size_t(i)] = k;
            }
    }

    // superoperator arrangement of the same monomials:
    // row (a*d+c)*d^2 + (e*d+g), col (b*d+dd)*d^2 + (f*d+h)
    Eigen::Index n4 = Eigen::Index(d2) * Eigen::Index(d2);
    Eigen::MatrixXcd diff{n4, n4};
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e)
                for (int g = 0; g < d; ++g) {
                    Eigen::Index row = Eigen::Index(a * d + c) * d2 + (e * d + g);
                    for (int b = 0; b < d; ++b)
                        for (int dd = 0; dd < d; ++dd)
                            for (int f = 0; f < d; ++f)
                                for (int h = 0; h < d; ++h) {
                                    Eigen::Index col = Eigen::Index(b * d + dd) * d2 + (f * d + h);
                                    int k = pair_of[std::size_t(a * d + b) * std::size_t(d2) +
                                                    std::size_t(c * d + dd)];
                                    int l = pair_of[std::size_t(e * d + f) * std::size_t(d2) +
                                                    std::size_t(g * d + h)];
                                    MonomialIndex t{a, b, c, dd, e, f, g, h};
                                    diff(row, col) =
                                        haar_second_moment_entry(d, t) - gram_at(k, l);
                                }
                }

    // power iteration on diff^dagger diff for the top singular value
    Rng rng(42);
    Eigen::VectorXcd v{n4};
    for (Eigen::Index i = 0; i < n4; ++i) v(i) = cx(rng.normal(), rng.normal());
    v.normalize();
    double sigma2 = 0;
    for (int it = 0; it < 300; ++it) {
        Eigen::VectorXcd w = diff * v;
        Eigen::VectorXcd u = diff.adjoint() * w;
        double next = u.norm();
        if (next == 0) return 0.0;
        v = u / next;
        if (it > 10 && std::abs(next - sigma2) <= 1e-12 * next) {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    // v converged to the top right-singular vector; ||diff v|| is sigma_max
    return (diff * v).norm();
}

}  // namespace qfm::moments
