#include "qfm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qfm/rng.hpp"
#include "qfm/spectrum.hpp"

namespace qfm::trainer {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_target(const circuit::Circuit& c, long long key) {
    auto table = spectrum::full_redundancy(c.encoding);
    if (table.count(key) > 0) return;
    long long lo = key, hi = key;
    while (lo > -c.max_key && table.count(lo) == 0) --lo;
    while (hi < c.max_key && table.count(hi) == 0) ++hi;
    std::ostringstream msg;
    msg << "train: target frequency " << key << " is not in the model spectrum;"
        << " nearest supported:";
    if (table.count(lo) > 0) msg << " " << lo;
    if (table.count(hi) > 0 && hi != lo) msg << " " << hi;
    throw std::invalid_argument(msg.str());
}

// L = 1 layered circuits with a global |0><0| observable admit the amplitude
// form f(x) = |sum_j g_j e^{-i lambda_j x}|^2 with g = row_0(W2) .* (W1|0>),
// which turns a full-grid evaluation into two statevector sweeps and one FFT.
struct FastPath {
    circuit::Circuit w1;       // pre-encoding block, global theta slots
    circuit::Circuit w2_rev;   // post block with gate order reversed: run with
                               // -theta to get W2^dagger |0>
    std::vector<long long> keys;  // lattice frequency of each basis state
    std::vector<bool> in_w1;      // param slot -> owning block

    std::vector<cx> row0(const std::vector<double>& theta) const {
        std::vector<double> neg(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) neg[i] = -theta[i];
        auto v = sim::run_statevector(w2_rev, neg, 0.0);
        for (auto& a : v) a = std::conj(a);
        return v;
    }
};

bool fast_path_applies(const circuit::Circuit& c, const Observable& obs) {
    return c.blocks.size() == 3 && c.blocks[0].type == circuit::BlockType::Trainable &&
           c.blocks[1].type == circuit::BlockType::Encoding &&
           c.blocks[2].type == circuit::BlockType::Trainable && c.haar_count == 0 &&
           obs.kind() == ObservableKind::GlobalZeroProjector;
}

FastPath make_fast_path(const circuit::Circuit& c) {
    FastPath fp;
    fp.w1.n_qubits = c.n_qubits;
    fp.w1.param_count = c.param_count;
    fp.w1.blocks.push_back(c.blocks[0]);
    fp.w2_rev.n_qubits = c.n_qubits;
    fp.w2_rev.param_count = c.param_count;
    circuit::Block rev = c.blocks[2];
    std::reverse(rev.gates.begin(), rev.gates.end());
    fp.w2_rev.blocks.push_back(std::move(rev));

    std::size_t dim = std::size_t(1) << c.n_qubits;
    std::vector<double> lambda(dim, 0.0);
    for (std::size_t b = 0; b < dim; ++b) {
        for (const auto& g : c.blocks[1].gates) {
            if (g.kind != circuit::GateKind::Encoding) continue;
            std::size_t idx = 0;
            for (std::size_t i = 0; i < g.qubits.size(); ++i)
                idx |= ((b >> g.qubits[i]) & 1u) << i;
            lambda[b] += g.eigs[idx];
        }
    }
    // path sums may sit off the lattice by a common offset (e.g. half-integer
    // pauli sums at odd n); only differences matter, and referencing to the
    // minimum changes a(x) by a global phase that |a|^2 cancels
    double ref = *std::min_element(lambda.begin(), lambda.end());
    fp.keys.assign(dim, 0);
    for (std::size_t b = 0; b < dim; ++b) {
        double scaled = (lambda[b] - ref) * c.freq_scale;
        long long key = std::llround(scaled);
        if (std::abs(scaled - double(key)) > 1e-9)
            throw std::logic_error("train: encoding eigenvalue off the integer lattice");
        fp.keys[b] = key;
    }

    fp.in_w1.assign(std::size_t(c.param_count), false);
    for (const auto& g : c.blocks[0].gates)
        if (g.param >= 0) fp.in_w1[std::size_t(g.param)] = true;
    return fp;
}

// f on the grid from the amplitude coefficients g_j
std::vector<double> fast_grid(const FastPath& fp, const std::vector<cx>& psi1,
                              const std::vector<cx>& row0, int grid) {
    std::vector<cx> bins(std::size_t(grid), cx(0, 0));
    for (std::size_t j = 0; j < psi1.size(); ++j) {
        long long bin = ((fp.keys[j] % grid) + grid) % grid;
        bins[std::size_t(bin)] += row0[j] * psi1[j];
    }
    fourier::forward_dft(bins);
    std::vector<double> f(std::size_t(grid), 0.0);
    for (int k = 0; k < grid; ++k) f[std::size_t(k)] = std::norm(bins[std::size_t(k)]);
    return f;
}

struct GridEval {
    const circuit::Circuit& c;
    const Observable& obs;
    const TrainConfig& cfg;
    int grid;
    bool fast;
    FastPath fp;

    std::vector<double> target;

    std::vector<double> values(const std::vector<double>& theta) const {
        if (fast)
            return fast_grid(fp, sim::run_statevector(fp.w1, theta, 0.0), fp.row0(theta), grid);
        std::vector<double> f(std::size_t(grid), 0.0);
        double period = 2.0 * kPi * c.freq_scale;
        for (int k = 0; k < grid; ++k)
            f[std::size_t(k)] = sim::evaluate(c, theta, period * k / grid, obs);
        return f;
    }

    double loss_of(const std::vector<double>& f) const {
        double s = 0;
        for (int k = 0; k < grid; ++k) {
            double r = f[std::size_t(k)] - target[std::size_t(k)];
            s += r * r;
        }
        return s / grid;
    }

    // dL/dtheta via the parameter-shift rule on every slot
    std::vector<double> gradient(const std::vector<double>& theta,
                                 const std::vector<double>& f) const {
        std::vector<double> resid(std::size_t(grid), 0.0);
        for (int k = 0; k < grid; ++k)
            resid[std::size_t(k)] = f[std::size_t(k)] - target[std::size_t(k)];
        std::vector<double> grad(theta.size(), 0.0);
        if (fast) {
            auto psi1 = sim::run_statevector(fp.w1, theta, 0.0);
            auto row0 = fp.row0(theta);
            std::vector<double> shifted = theta;
            for (std::size_t i = 0; i < theta.size(); ++i) {
                double acc = 0;
                for (double sign : {1.0, -1.0}) {
                    shifted[i] = theta[i] + sign * kPi / 2;
                    std::vector<double> f_s =
                        fp.in_w1[i]
                            ? fast_grid(fp, sim::run_statevector(fp.w1, shifted, 0.0), row0, grid)
                            : fast_grid(fp, psi1, fp.row0(shifted), grid);
                    for (int k = 0; k < grid; ++k)
                        acc += sign * resid[std::size_t(k)] * f_s[std::size_t(k)];
                }
                shifted[i] = theta[i];
                grad[i] = acc / grid;  // (2/G) * sum resid * (f+ - f-)/2
            }
        } else {
            double period = 2.0 * kPi * c.freq_scale;
            for (int k = 0; k < grid; ++k) {
                auto g = sim::gradient(c, theta, period * k / grid, obs);
                for (std::size_t i = 0; i < g.size(); ++i)
                    grad[i] += 2.0 * resid[std::size_t(k)] * g[i] / grid;
            }
        }
        return grad;
    }

    fourier::CoefficientSet snapshot(const std::vector<double>& f) const {
        fourier::CoefficientSet cs;
        cs.n_points = grid;
        cs.freq_scale = c.freq_scale;
        std::vector<cx> bins(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) bins[k] = cx(f[k], 0);
        fourier::forward_dft(bins);
        for (long long key = -c.max_key; key <= c.max_key; ++key) {
            long long bin = ((key % grid) + grid) % grid;
            cs.coeffs[key] = bins[std::size_t(bin)] / double(grid);
        }
        return cs;
    }
};

}  // namespace

TrainTrace train(const circuit::Circuit& c, const Observable& obs, const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("train: need epochs >= 1");
    if (cfg.lr <= 0) throw std::invalid_argument("train: need lr > 0");
    if (cfg.snapshot_period < 1) throw std::invalid_argument("train: need snapshot_period >= 1");
    if (c.param_count < 1) throw std::invalid_argument("train: circuit has no trainable slots");
    validate_target(c, cfg.target_key);

    int nyquist = int(2 * c.max_key + 1);
    int grid = cfg.grid_points == 0 ? nyquist : cfg.grid_points;
    if (grid < nyquist)
        throw std::invalid_argument("train: grid size " + std::to_string(grid) +
                                    " is below the Nyquist size " + std::to_string(nyquist));

    GridEval ev{c, obs, cfg, grid, fast_path_applies(c, obs), {}, {}};
    if (ev.fast) ev.fp = make_fast_path(c);
    ev.target.resize(std::size_t(grid));
    for (int k = 0; k < grid; ++k)
        ev.target[std::size_t(k)] =
            cfg.offset + cfg.amplitude * std::cos(2.0 * kPi * double(cfg.target_key) * k / grid);

    Rng rng = Rng::for_task(cfg.seed, 0, 0);
    std::vector<double> theta(std::size_t(c.param_count));
    for (auto& t : theta) t = rng.uniform(0, 2 * kPi);

    TrainTrace trace;
    auto f = ev.values(theta);
    trace.loss.push_back(ev.loss_of(f));
    trace.snapshot_epochs.push_back(0);
    trace.snapshots.push_back(ev.snapshot(f));

    // spot-check the analytic gradient against central differences on the loss
    {
        auto grad = ev.gradient(theta, f);
        double h = 1e-5;
        for (std::size_t i : {std::size_t(0), theta.size() / 2, theta.size() - 1}) {
            std::vector<double> t2 = theta;
            t2[i] = theta[i] + h;
            double up = ev.loss_of(ev.values(t2));
            t2[i] = theta[i] - h;
            double dn = ev.loss_of(ev.values(t2));
            double fd = (up - dn) / (2 * h);
            trace.grad_check_dev = std::max(trace.grad_check_dev, std::abs(fd - grad[i]));
        }
        if (trace.grad_check_dev > 1e-4)
            throw std::logic_error("train: gradient check failed (dev " +
                                   format_double(trace.grad_check_dev) + ")");
    }

    std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);
    const double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto grad = ev.gradient(theta, f);
        if (cfg.optimizer == Optimizer::Adam) {
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m[i] = b1 * m[i] + (1 - b1) * grad[i];
                v[i] = b2 * v[i] + (1 - b2) * grad[i] * grad[i];
                double mh = m[i] / (1 - std::pow(b1, epoch));
                double vh = v[i] / (1 - std::pow(b2, epoch));
                theta[i] -= cfg.lr * mh / (std::sqrt(vh) + adam_eps);
            }
        } else {
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg.lr * grad[i];
        }
        f = ev.values(theta);
        double loss = ev.loss_of(f);
        if (!std::isfinite(loss)) throw std::runtime_error("train: loss diverged");
        trace.loss.push_back(loss);
        if (epoch % cfg.snapshot_period == 0 || epoch == cfg.epochs) {
            trace.snapshot_epochs.push_back(epoch);
            trace.snapshots.push_back(ev.snapshot(f));
        }
    }
    trace.final_theta = std::move(theta);
    return trace;
}

std::vector<fourier::CoefficientSet> coefficient_trace(
    const circuit::Circuit& c, const Observable& obs,
    const std::vector<std::vector<double>>& history) {
    std::vector<fourier::CoefficientSet> out;
    out.reserve(history.size());
    for (const auto& theta : history) out.push_back(fourier::extract_coefficients(c, theta, obs));
    return out;
}

}  // namespace qfm::trainer
