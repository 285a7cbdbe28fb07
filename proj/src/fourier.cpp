#include "qfm/fourier.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

#include "qfm/parallel.hpp"

namespace qfm::fourier {

namespace {

constexpr std::size_t kMaxDft = 1'100'000;

// Plan cache: plan creation is not thread-safe and costs more than a small
// transform. Plans are created FFTW_UNALIGNED so they can execute on any
// caller buffer via the new-array interface.
std::mutex plan_mutex;

fftw_plan plan_for(int n) {
    static std::map<int, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cx> tmp(std::size_t(n), cx(0, 0));
    auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[n] = p;
    return p;
}

}  // namespace

void forward_dft(std::vector<cx>& data) {
    fftw_plan p = plan_for(int(data.size()));
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
}

CoefficientSet extract_coefficients(const circuit::Circuit& c, const std::vector<double>& theta,
                                    const Observable& obs, const sim::HaarAssignment* haars) {
    long long max_key = c.max_key;
    std::size_t n = std::size_t(2 * max_key + 1);
    if (n > kMaxDft)
        throw std::invalid_argument(
            "extract_coefficients: DFT size " + std::to_string(n) +
            " exceeds the guard (" + std::to_string(kMaxDft) +
            "); the spectrum is too wide (exponential encodings need nL <= 12)");

    CoefficientSet cs;
    cs.n_points = int(n);
    cs.freq_scale = c.freq_scale;

    std::vector<cx> grid(n);
    double period = 2.0 * std::numbers::pi * c.freq_scale;
    for (std::size_t k = 0; k < n; ++k) {
        double x = period * double(k) / double(n);
        grid[k] = sim::evaluate(c, theta, x, obs, haars);
    }
    if (n > 1) forward_dft(grid);
    for (long long key = -max_key; key <= max_key; ++key) {
        std::size_t bin = std::size_t(key >= 0 ? key : key + (long long)(n));
        cs.coeffs[key] = grid[bin] / double(n);
    }
    return cs;
}

std::vector<double> reconstruct_grid(const CoefficientSet& cs) {
    std::size_t n = std::size_t(cs.n_points);
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        cx acc = 0;
        for (const auto& [key, c] : cs.coeffs)
            acc += c * std::exp(cx(0, 2.0 * std::numbers::pi * double(key) * double(k) / double(n)));
        out[k] = acc.real();
    }
    return out;
}

CoefficientStats coefficient_statistics(const circuit::Circuit& c, const Observable& obs,
                                        int samples, std::uint64_t seed, int threads) {
    if (samples < 2) throw std::invalid_argument("coefficient_statistics: need samples >= 2");
    if (threads <= 0) threads = default_threads();

    long long max_key = c.max_key;
    std::size_t bins = std::size_t(2 * max_key + 1);

    // fixed chunking so the pairwise reduction order never depends on the
    // thread count; per-chunk buffers are reduced in index order
    std::size_t n_chunks = std::min<std::size_t>(64, std::size_t((samples + 15) / 16));
    struct ChunkAcc {
        std::vector<cx> sum;
        std::vector<double> sum2, sum4;
    };
    std::vector<ChunkAcc> acc(n_chunks);

    parallel_for_chunks(n_chunks, threads, [&](std::size_t chunk) {
        ChunkAcc local;
        local.sum.assign(bins, cx(0, 0));
        local.sum2.assign(bins, 0.0);
        local.sum4.assign(bins, 0.0);
        std::size_t lo = std::size_t(samples) * chunk / n_chunks;
        std::size_t hi = std::size_t(samples) * (chunk + 1) / n_chunks;
        for (std::size_t i = lo; i < hi; ++i) {
            Rng theta_rng = Rng::for_task(seed, 0, i);
            std::vector<double> theta(std::size_t(c.param_count));
            for (auto& t : theta) t = theta_rng.uniform(0, 2 * std::numbers::pi);
            sim::HaarAssignment haars;
            if (c.haar_count > 0) {
                Rng haar_rng = Rng::for_task(seed, 1, i);
                haars = sim::sample_haar_assignment(c, haar_rng);
            }
            auto cs = extract_coefficients(c, theta, obs, c.haar_count > 0 ? &haars : nullptr);
            for (const auto& [key, coef] : cs.coeffs) {
                std::size_t b = std::size_t(key + max_key);
                double a2 = std::norm(coef);
                local.sum[b] += coef;
                local.sum2[b] += a2;
                local.sum4[b] += a2 * a2;
            }
        }
        acc[chunk] = std::move(local);
    });

    CoefficientStats st;
    st.max_key = max_key;
    st.freq_scale = c.freq_scale;
    st.samples = samples;
    st.seed = seed;
    st.mean.assign(bins, cx(0, 0));
    st.mean_abs_sq.assign(bins, 0.0);
    st.mean_abs_4th.assign(bins, 0.0);
    for (const auto& a : acc)
        for (std::size_t b = 0; b < bins; ++b) {
            st.mean[b] += a.sum[b];
            st.mean_abs_sq[b] += a.sum2[b];
            st.mean_abs_4th[b] += a.sum4[b];
        }
    for (std::size_t b = 0; b < bins; ++b) {
        st.mean[b] /= double(samples);
        st.mean_abs_sq[b] /= double(samples);
        st.mean_abs_4th[b] /= double(samples);
    }
    return st;
}

NormBoundReport norm_bound_check(const CoefficientSet& cs, const Observable& obs) {
    NormBoundReport r;
    r.sum_sq = cs.sum_abs_sq();
    r.bound = obs.norm_inf() * obs.norm_inf();
    r.pass = r.sum_sq <= r.bound + 1e-9;
    return r;
}

}  // namespace qfm::fourier
