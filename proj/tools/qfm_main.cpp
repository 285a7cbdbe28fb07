#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "qfm/fourier.hpp"
#include "qfm/moments.hpp"
#include "qfm/theory.hpp"
#include "qfm/trainer.hpp"

using json = nlohmann::json;
using namespace qfm;

namespace {

struct Opts {
    std::string encoding = "pauli";
    int n = 2;
    int L = 1;
    std::string ansatz = "haar";
    int reps = 1;
    int m = 2;
    int L1 = 1;
    int L2 = 1;
    int site = 0;
    std::string observable = "global";
    int rank = 1;
    int samples = 10000;
    std::uint64_t seed = 0;
    std::string output;
    int threads = 0;
    std::string config_path;
    // bounds / epsilon
    std::string bound_kind = "approx";
    std::string eps_norm = "monomial";
    double eps = 0.0;
    bool spectral = false;
    int row_block = 0;
    int trials = 100;
    // train
    long long target = 1;
    double amplitude = 0.25;
    double offset = 0.4;
    double lr = 0.05;
    int epochs = 300;
    int grid = 0;
    int snapshot_period = 50;
    std::string optimizer = "adam";
};

// one JSON-overridable option: section.key in the config file maps onto a
// CLI option; command-line values win
struct Binding {
    std::string section, key;
    CLI::Option* opt;
    std::function<void(const json&)> set;
};

struct SubContext {
    CLI::App* sub = nullptr;
    std::vector<Binding> bindings;
    CLI::Option* seed_opt = nullptr;

    template <typename T>
    CLI::Option* bind(const std::string& flag, T& var, const std::string& desc,
                      const std::string& section, const std::string& key) {
        CLI::Option* o = sub->add_option(flag, var, desc);
        bindings.push_back({section, key, o, [&var](const json& j) { var = j.get<T>(); }});
        return o;
    }
};

void apply_config(const SubContext& ctx, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path);
    json cfg = json::parse(in);
    for (const auto& [section, body] : cfg.items()) {
        if (!body.is_object())
            throw std::invalid_argument("config: section '" + section + "' must be an object");
        for (const auto& [key, value] : body.items()) {
            const Binding* hit = nullptr;
            for (const auto& b : ctx.bindings)
                if (b.section == section && b.key == key) hit = &b;
            if (!hit)
                throw std::invalid_argument("config: unknown field '" + section + "." + key +
                                            "' for this subcommand");
            if (hit->opt->count() == 0) hit->set(value);
        }
    }
}

spectrum::EncodingSpec make_spec(const Opts& o) {
    if (o.encoding == "pauli")
        return spectrum::build_encoding(spectrum::EncodingStrategy::Pauli, o.n, o.L);
    if (o.encoding == "exponential")
        return spectrum::build_encoding(spectrum::EncodingStrategy::Exponential, o.n, o.L);
    if (o.encoding == "golomb")
        return spectrum::build_encoding(spectrum::EncodingStrategy::Golomb, o.n, o.L);
    throw std::invalid_argument("unknown encoding '" + o.encoding +
                                "' (expected pauli, exponential, or golomb)");
}

circuit::AnsatzKind make_ansatz(const std::string& name) {
    if (name == "se" || name == "strongly-entangling") return circuit::AnsatzKind::StronglyEntangling;
    if (name == "s2d" || name == "simplified-two-design")
        return circuit::AnsatzKind::SimplifiedTwoDesign;
    if (name == "haar") return circuit::AnsatzKind::HaarBlock;
    throw std::invalid_argument("unknown ansatz '" + name + "' (expected se, s2d, or haar)");
}

Observable make_observable(const Opts& o, int n) {
    if (o.observable == "global") return Observable::global_zero_projector(n);
    if (o.observable == "local") return Observable::local_zero_average(n);
    if (o.observable == "site") {
        std::vector<int> qubits;
        for (int q = o.site * o.m; q < (o.site + 1) * o.m; ++q) qubits.push_back(q);
        return Observable::local_site_projector(n, qubits, o.rank);
    }
    throw std::invalid_argument("unknown observable '" + o.observable +
                                "' (expected global, local, or site)");
}

// standalone trainable block for the epsilon subcommand
circuit::Circuit block_circuit(int n, circuit::AnsatzKind kind, int reps) {
    circuit::Circuit c;
    c.n_qubits = n;
    circuit::Block b;
    b.type = circuit::BlockType::Trainable;
    std::vector<int> qubits;
    for (int q = 0; q < n; ++q) qubits.push_back(q);
    int next_param = 0, next_haar = 0;
    switch (kind) {
        case circuit::AnsatzKind::StronglyEntangling:
            circuit::append_strongly_entangling(b, qubits, reps, next_param);
            break;
        case circuit::AnsatzKind::SimplifiedTwoDesign:
            circuit::append_simplified_two_design(b, qubits, reps, next_param);
            break;
        case circuit::AnsatzKind::HaarBlock:
            circuit::append_haar(b, qubits, next_haar);
            break;
    }
    c.blocks.push_back(std::move(b));
    c.param_count = next_param;
    c.haar_count = next_haar;
    return c;
}

std::string config_comment(const std::string& sub, const Opts& o,
                           std::initializer_list<std::pair<std::string, std::string>> extra) {
    std::ostringstream s;
    // thread count deliberately omitted: outputs are thread-count invariant
    s << "# subcommand=" << sub << " encoding=" << o.encoding << " n=" << o.n << " L=" << o.L
      << " seed=" << o.seed;
    for (const auto& [k, v] : extra) s << " " << k << "=" << v;
    s << "\n";
    return s.str();
}

struct Artifact {
    std::string path;
    std::string content;
};

void emit(const std::vector<Artifact>& files) {
    for (const auto& f : files) {
        std::filesystem::path p(f.path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream out(f.path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + f.path);
        out << f.content;
    }
}

// ------------------------------------------------------------------ handlers

void run_spectrum(const Opts& o) {
    auto table = spectrum::full_redundancy(make_spec(o));
    std::ostringstream csv;
    csv << config_comment("spectrum", o, {});
    csv << "omega,redundancy\n";
    for (const auto& [w, r] : table.entries) csv << w << "," << format_u128(r) << "\n";
    std::string path = o.output.empty() ? "spectrum.csv" : o.output;
    emit({{path, csv.str()}});
    std::cout << "spectrum: " << table.entries.size() << " frequencies -> " << path << "\n";
}

void run_variance_mc(const Opts& o) {
    auto spec = make_spec(o);
    auto c = build_model_circuit(spec, make_ansatz(o.ansatz), o.reps);
    auto obs = make_observable(o, o.n);
    auto table = spectrum::full_redundancy(spec);
    auto st = fourier::coefficient_statistics(c, obs, o.samples, o.seed, o.threads);
    std::ostringstream csv;
    csv << config_comment("variance-mc", o,
                          {{"ansatz", o.ansatz},
                           {"reps", std::to_string(o.reps)},
                           {"observable", o.observable},
                           {"samples", std::to_string(o.samples)}});
    csv << "omega,redundancy,mean_re,mean_im,var_mc,stderr\n";
    for (long long w = -c.max_key; w <= c.max_key; ++w) {
        if (table.count(w) == 0 && w != 0) continue;
        csv << w << "," << format_u128(table.count(w)) << "," << format_double(st.mean_at(w).real())
            << "," << format_double(st.mean_at(w).imag()) << ","
            << format_double(st.variance_at(w)) << "," << format_double(st.stderr_at(w)) << "\n";
    }
    std::string path = o.output.empty() ? "variance_mc.csv" : o.output;
    emit({{path, csv.str()}});
    std::cout << "variance-mc: " << o.samples << " samples -> " << path << "\n";
}

void run_variance_theory(const Opts& o) {
    auto spec = make_spec(o);
    auto obs = make_observable(o, o.n);
    auto scalars = theory::scalars_for(obs);
    auto table = spectrum::full_redundancy(spec);
    std::ostringstream csv;
    csv << config_comment("variance-theory", o, {{"observable", o.observable}});
    csv << "omega,redundancy,var_theory,flag\n";
    for (const auto& [w, r] : table.entries) {
        theory::VarResult v;
        if (o.L == 1) {
            v = theory::var_2design_single(scalars, r, w == 0);
        } else {
            std::vector<u128> partial;
            for (int j = 1; j <= o.L; ++j)
                partial.push_back(spectrum::partial_redundancy(spec, j, o.L).table.count(w));
            v = theory::var_2design_reuploading(scalars, partial, w == 0);
        }
        csv << w << "," << format_u128(r) << "," << format_double(v.value) << ","
            << (v.approximate ? "approx" : "exact") << "\n";
    }
    std::string path = o.output.empty() ? "variance_theory.csv" : o.output;
    emit({{path, csv.str()}});
    std::cout << "variance-theory: " << table.entries.size() << " frequencies -> " << path << "\n";
}

void run_bounds(const Opts& o) {
    auto spec = make_spec(o);
    auto obs = make_observable(o, o.n);
    auto scalars = theory::scalars_for(obs);
    std::ostringstream csv;
    csv << config_comment("bounds", o,
                          {{"kind", o.bound_kind},
                           {"eps", format_double(o.eps)},
                           {"eps_norm", o.eps_norm},
                           {"observable", o.observable}});
    csv << "omega,bound_kind,value\n";
    if (o.bound_kind == "approx") {
        auto table = spectrum::full_redundancy(spec);
        auto norm = theory::parse_eps_norm(o.eps_norm);
        for (const auto& [w, r] : table.entries)
            csv << w << ",approx-" << o.eps_norm << ","
                << format_double(theory::bound_approx_2design(norm, scalars, o.eps, r, w == 0))
                << "\n";
    } else if (o.bound_kind == "model") {
        csv << "all,model," << format_double(theory::bound_model_variance(scalars, o.eps)) << "\n";
    } else if (o.bound_kind == "local" || o.bound_kind == "lightcone") {
        circuit::BrickwiseLayout lay{o.n, o.m, o.L1, o.L2, o.site};
        auto c = build_brickwise(lay, spec, {make_ansatz(o.ansatz), o.reps});
        auto lc = extract_lightcone(c, lay);
        for (const auto& [w, r] : lc.r_ek.entries) {
            if (o.bound_kind == "local") {
                csv << w << ",local-projector,"
                    << format_double(theory::bound_local_2design(theory::LocalCase::Projector, o.m,
                                                                 o.L2, o.rank, r))
                    << "\n";
            } else if (w != 0) {
                csv << w << ",lightcone,"
                    << format_double(theory::var_2design_lightcone(o.m, o.L1, o.L2, o.rank, o.rank,
                                                                  r))
                    << "\n";
            }
        }
    } else {
        throw std::invalid_argument("unknown bound kind '" + o.bound_kind +
                                    "' (expected approx, model, local, or lightcone)");
    }
    std::string path = o.output.empty() ? "bounds.csv" : o.output;
    emit({{path, csv.str()}});
    std::cout << "bounds: kind " << o.bound_kind << " -> " << path << "\n";
}

void run_epsilon(const Opts& o) {
    auto block = block_circuit(o.n, make_ansatz(o.ansatz), o.reps);
    auto ens = moments::block_ensemble(block);
    moments::MomentOptions mo;
    mo.row_block = o.row_block;
    auto rep = moments::empirical_epsilon_monomial(ens, o.samples, o.seed, mo);
    json out;
    out["d"] = rep.d;
    out["samples"] = rep.samples;
    out["seed"] = rep.seed;
    out["epsilon_m"] = rep.epsilon_m;
    out["stderr"] = rep.stderr_;
    out["argmax_indices"] = {rep.argmax.r1, rep.argmax.c1, rep.argmax.r2, rep.argmax.c2,
                            rep.argmax.r3, rep.argmax.c3, rep.argmax.r4, rep.argmax.c4};
    out["low_sample_warning"] = rep.low_sample_warning;
    if (o.spectral)
        out["epsilon_inf"] = moments::empirical_epsilon_spectral(ens, o.samples, o.seed, mo);
    std::string path = o.output.empty() ? "epsilon.json" : o.output;
    emit({{path, out.dump(2) + "\n"}});
    std::cout << "epsilon: epsilon_m = " << format_double(rep.epsilon_m) << " -> " << path << "\n";
}

void run_lightcone(const Opts& o) {
    auto spec = make_spec(o);
    circuit::BrickwiseLayout lay{o.n, o.m, o.L1, o.L2, o.site};
    auto c = build_brickwise(lay, spec, {make_ansatz(o.ansatz), o.reps});
    auto lc = extract_lightcone(c, lay);
    json out;
    out["n"] = o.n;
    out["m"] = o.m;
    out["L1"] = o.L1;
    out["L2"] = o.L2;
    out["site"] = o.site;
    out["support"] = lc.support;
    out["enc_support"] = lc.enc_support;
    out["complement"] = lc.complement;
    json r_ek = json::object();
    for (const auto& [w, r] : lc.r_ek.entries) r_ek[std::to_string(w)] = format_u128(r);
    out["r_ek"] = r_ek;
    std::string path = o.output.empty() ? "lightcone.json" : o.output;
    emit({{path, out.dump(2) + "\n"}});
    std::cout << "lightcone: support size " << lc.support.size() << " -> " << path << "\n";
}

void run_train(const Opts& o) {
    auto spec = make_spec(o);
    auto ansatz = o.ansatz == "haar" ? circuit::AnsatzKind::StronglyEntangling
                                     : make_ansatz(o.ansatz);
    auto c = build_model_circuit(spec, ansatz, o.reps);
    auto obs = make_observable(o, o.n);
    trainer::TrainConfig cfg;
    cfg.target_key = o.target;
    cfg.amplitude = o.amplitude;
    cfg.offset = o.offset;
    cfg.grid_points = o.grid;
    cfg.epochs = o.epochs;
    cfg.lr = o.lr;
    cfg.optimizer = o.optimizer == "sgd" ? trainer::Optimizer::Sgd : trainer::Optimizer::Adam;
    cfg.seed = o.seed;
    cfg.snapshot_period = o.snapshot_period;
    auto tr = trainer::train(c, obs, cfg);

    auto header = config_comment("train", o,
                                 {{"target", std::to_string(o.target)},
                                  {"amplitude", format_double(o.amplitude)},
                                  {"offset", format_double(o.offset)},
                                  {"epochs", std::to_string(o.epochs)},
                                  {"lr", format_double(o.lr)},
                                  {"optimizer", o.optimizer}});
    std::ostringstream loss_csv;
    loss_csv << header << "epoch,loss\n";
    for (std::size_t e = 0; e < tr.loss.size(); ++e)
        loss_csv << e << "," << format_double(tr.loss[e]) << "\n";
    std::ostringstream coef_csv;
    coef_csv << header << "epoch,omega,abs_c\n";
    for (std::size_t s = 0; s < tr.snapshots.size(); ++s)
        for (const auto& [w, v] : tr.snapshots[s].coeffs)
            coef_csv << tr.snapshot_epochs[s] << "," << w << "," << format_double(std::abs(v))
                     << "\n";
    std::string dir = o.output.empty() ? "." : o.output;
    emit({{dir + "/loss.csv", loss_csv.str()}, {dir + "/coeffs.csv", coef_csv.str()}});
    std::cout << "train: final loss " << format_double(tr.loss.back()) << " -> " << dir
              << "/loss.csv, " << dir << "/coeffs.csv\n";
}

void run_norm_check(const Opts& o) {
    auto spec = make_spec(o);
    auto c = build_model_circuit(spec, make_ansatz(o.ansatz), o.reps);
    auto obs = make_observable(o, o.n);
    std::ostringstream csv;
    csv << config_comment("norm-check", o,
                          {{"ansatz", o.ansatz},
                           {"observable", o.observable},
                           {"trials", std::to_string(o.trials)}});
    csv << "trial,sum_sq,bound,pass\n";
    int passed = 0;
    for (int t = 0; t < o.trials; ++t) {
        Rng theta_rng = Rng::for_task(o.seed, 0, std::uint64_t(t));
        std::vector<double> theta(std::size_t(c.param_count));
        for (auto& v : theta) v = theta_rng.uniform(0, 2 * std::numbers::pi);
        sim::HaarAssignment haars;
        if (c.haar_count > 0) {
            Rng haar_rng = Rng::for_task(o.seed, 1, std::uint64_t(t));
            haars = sim::sample_haar_assignment(c, haar_rng);
        }
        auto cs = fourier::extract_coefficients(c, theta, obs, c.haar_count > 0 ? &haars : nullptr);
        auto rep = fourier::norm_bound_check(cs, obs);
        passed += rep.pass;
        csv << t << "," << format_double(rep.sum_sq) << "," << format_double(rep.bound) << ","
            << (rep.pass ? "1" : "0") << "\n";
    }
    std::string path = o.output.empty() ? "norm_check.csv" : o.output;
    emit({{path, csv.str()}});
    std::cout << "norm-check: " << passed << "/" << o.trials << " pass -> " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Fourier model toolkit"};
    app.require_subcommand(1);
    Opts o;
    std::vector<SubContext> contexts;

    auto add_common = [&](CLI::App* sub) -> SubContext& {
        contexts.push_back({});
        SubContext& ctx = contexts.back();
        ctx.sub = sub;
        ctx.bind("--encoding", o.encoding, "pauli | exponential | golomb", "encoding", "strategy");
        ctx.bind("-n,--qubits", o.n, "encoding qubits per layer", "encoding", "n");
        ctx.bind("-L,--layers", o.L, "encoding layers", "encoding", "L");
        ctx.seed_opt = ctx.bind("--seed", o.seed, "RNG seed (QFM_SEED as fallback)", "run", "seed");
        ctx.bind("--threads", o.threads, "worker threads (0 = hardware)", "run", "threads");
        ctx.bind("-o,--output", o.output, "output path", "run", "output");
        sub->add_option("--config", o.config_path, "JSON config file");
        return ctx;
    };
    auto add_ansatz = [&](SubContext& ctx) {
        ctx.bind("--ansatz", o.ansatz, "se | s2d | haar", "ansatz", "kind");
        ctx.bind("--reps", o.reps, "ansatz repetitions / depth", "ansatz", "reps");
    };
    auto add_observable = [&](SubContext& ctx) {
        ctx.bind("--observable", o.observable, "global | local | site", "observable", "kind");
        ctx.bind("--rank", o.rank, "site projector rank", "observable", "rank");
    };
    auto add_brickwise = [&](SubContext& ctx) {
        ctx.bind("-m,--brick", o.m, "brick width", "ansatz", "m");
        ctx.bind("--L1", o.L1, "pre-encoding brick rows", "brickwise", "L1");
        ctx.bind("--L2", o.L2, "post-encoding brick rows", "brickwise", "L2");
        ctx.bind("--site", o.site, "observable brick index", "brickwise", "site");
    };

    add_common(app.add_subcommand("spectrum", "frequency spectrum and redundancies"));
    {
        auto& ctx = add_common(app.add_subcommand("variance-mc", "Monte-Carlo coefficient stats"));
        add_ansatz(ctx);
        add_observable(ctx);
        ctx.bind("--samples", o.samples, "Monte-Carlo samples", "run", "samples");
    }
    {
        auto& ctx =
            add_common(app.add_subcommand("variance-theory", "closed-form 2-design variances"));
        add_observable(ctx);
    }
    {
        auto& ctx = add_common(app.add_subcommand("bounds", "variance upper bounds"));
        add_ansatz(ctx);
        add_observable(ctx);
        add_brickwise(ctx);
        ctx.bind("--kind", o.bound_kind, "approx | model | local | lightcone", "bounds", "kind");
        ctx.bind("--eps", o.eps, "design deviation epsilon", "bounds", "eps");
        ctx.bind("--eps-norm", o.eps_norm, "diamond | spectral | monomial", "bounds", "eps_norm");
    }
    {
        auto& ctx = add_common(app.add_subcommand("epsilon", "empirical 2-design deviation"));
        add_ansatz(ctx);
        ctx.bind("--samples", o.samples, "ensemble samples", "run", "samples");
        ctx.bind("--spectral", o.spectral, "also compute epsilon_inf (d <= 8)", "epsilon",
                 "spectral");
        ctx.bind("--row-block", o.row_block, "stream the scan in row slabs (d = 16)", "epsilon",
                 "row_block");
    }
    {
        auto& ctx = add_common(app.add_subcommand("lightcone", "brickwise light-cone geometry"));
        add_ansatz(ctx);
        add_brickwise(ctx);
    }
    {
        auto& ctx = add_common(app.add_subcommand("train", "fit a sinusoidal target"));
        add_ansatz(ctx);
        add_observable(ctx);
        ctx.bind("--target", o.target, "target frequency (lattice key)", "train", "target");
        ctx.bind("--amplitude", o.amplitude, "target amplitude", "train", "amplitude");
        ctx.bind("--offset", o.offset, "target offset", "train", "offset");
        ctx.bind("--epochs", o.epochs, "training epochs", "train", "epochs");
        ctx.bind("--lr", o.lr, "learning rate", "train", "lr");
        ctx.bind("--grid", o.grid, "grid points (0 = Nyquist)", "train", "grid");
        ctx.bind("--optimizer", o.optimizer, "adam | sgd", "train", "optimizer");
        ctx.bind("--snapshot-period", o.snapshot_period, "epochs between snapshots", "train",
                 "snapshot_period");
    }
    {
        auto& ctx = add_common(app.add_subcommand("norm-check", "Fourier norm bound check"));
        add_ansatz(ctx);
        add_observable(ctx);
        ctx.bind("--trials", o.trials, "random theta draws", "run", "trials");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        SubContext* ctx = nullptr;
        for (auto& c : contexts)
            if (c.sub == sub) ctx = &c;
        if (!o.config_path.empty()) apply_config(*ctx, o.config_path);
        if (ctx->seed_opt->count() == 0 && o.seed == 0) {
            if (const char* env = std::getenv("QFM_SEED")) o.seed = std::strtoull(env, nullptr, 10);
        }

        const std::string name = sub->get_name();
        if (name == "spectrum") run_spectrum(o);
        else if (name == "variance-mc") run_variance_mc(o);
        else if (name == "variance-theory") run_variance_theory(o);
        else if (name == "bounds") run_bounds(o);
        else if (name == "epsilon") run_epsilon(o);
        else if (name == "lightcone") run_lightcone(o);
        else if (name == "train") run_train(o);
        else if (name == "norm-check") run_norm_check(o);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
