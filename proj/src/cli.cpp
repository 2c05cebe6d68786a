#include "pcsmono/cli.hpp"

#include "pcsmono/io.hpp"
#include "pcsmono/monogamy.hpp"
#include "pcsmono/seeding.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace pcsmono {

namespace {

constexpr const char* kThreadsEnv = "PCSMONO_THREADS";
constexpr double kChannelTol = 1e-10;

int default_threads() {
    const char* raw = std::getenv(kThreadsEnv);
    if (raw == nullptr || *raw == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
        throw InputError(std::string(kThreadsEnv) + " must be an integer >= 1");
    }
    return static_cast<int>(v);
}

struct RunConfig {
    std::string input;
    std::string output = "-";
    int focus = 1;
    std::uint64_t seed = 0;
    int r = 0;
    int starts = 8;
    double tol = 1e-7;
    int max_iter = 2000;
    int threads = 1;
    bool force_generic = false;
    double tolerance = 0.0;
    double closed_tol = 1e-10;
    double optimizer_tol = 1e-4;
    double zero_tol = 1e-6;

    RoofOptions roof() const {
        RoofOptions o;
        if (r > 0) o.size = r;
        o.starts = starts;
        o.tol = tol;
        o.max_iter = max_iter;
        o.seed = seed;
        o.threads = threads;
        return o;
    }

    MonogamyOptions mono() const {
        MonogamyOptions o;
        o.roof = roof();
        o.nested.seed = splitmix64(seed);
        o.force_generic = force_generic;
        o.tolerance = tolerance > 0.0 ? tolerance : (force_generic ? optimizer_tol : closed_tol);
        return o;
    }

    void validate() const {
        if (starts < 1) throw InputError("--starts must be >= 1");
        if (!(tol > 0.0) || !(closed_tol > 0.0) || !(optimizer_tol > 0.0) || !(zero_tol > 0.0) || tolerance < 0.0) {
            throw InputError("tolerances must be positive");
        }
        if (max_iter < 1) throw InputError("--max-iter must be >= 1");
        if (threads < 1) throw InputError("--threads must be >= 1");
        if (focus < 1) throw InputError("--focus is 1-based");
    }
};

void add_optimizer_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--seed", cfg.seed, "Root seed (64-bit unsigned)");
    cmd->add_option("--r", cfg.r, "Fixed decomposition size; default sweeps rank..rank+2");
    cmd->add_option("--starts", cfg.starts, "Optimizer starts per decomposition size");
    cmd->add_option("--tol", cfg.tol, "Simplex convergence tolerance");
    cmd->add_option("--max-iter", cfg.max_iter, "Objective evaluations per start");
    cmd->add_option("--threads", cfg.threads, std::string("Worker threads (default from ") + kThreadsEnv + ")");
    cmd->add_flag("--force-generic", cfg.force_generic, "Disable closed forms and PCS recognition");
    cmd->add_option("--tolerance", cfg.tolerance, "Override the pass/fail tolerance");
    cmd->add_option("--closed-tol", cfg.closed_tol, "Tolerance for closed-form identities");
    cmd->add_option("--optimizer-tol", cfg.optimizer_tol, "Tolerance for optimizer-backed checks");
    cmd->add_option("--zero-tol", cfg.zero_tol, "Tolerance for zero n-SCREN checks");
}

void add_io_flags(CLI::App* cmd, RunConfig& cfg, bool needs_input) {
    auto* in = cmd->add_option("-i,--input", cfg.input, "State file (JSON)");
    if (needs_input) in->required();
    cmd->add_option("-o,--output", cfg.output, "Output path, '-' for stdout");
}

PCSState load_state(const RunConfig& cfg) {
    return state_from_json(read_json_file(cfg.input));
}

int focus_index(const RunConfig& cfg, int n) {
    if (cfg.focus > n) throw InputError("--focus exceeds the party count");
    return cfg.focus - 1;
}

// ---------------------------------------------------------------------------

struct BuildFlags {
    std::vector<int> standard;
    std::vector<int> random;
    std::string coeffs;
    double p = 1.0;
    double lambda = 1.0;
};

int cmd_build(const RunConfig& cfg, const BuildFlags& flags, std::ostream& out, std::ostream& err) {
    const int sources = (!flags.standard.empty()) + (!flags.random.empty()) + (!flags.coeffs.empty());
    if (sources != 1) throw InputError("build needs exactly one of --standard-w, --random, --coeffs");
    std::optional<WClassCoefficients> coeffs;
    if (!flags.standard.empty()) {
        coeffs = WClassCoefficients::standard(flags.standard[0], flags.standard[1]);
    } else if (!flags.random.empty()) {
        coeffs = sample_random_wclass(flags.random[0], flags.random[1], cfg.seed);
    } else {
        coeffs = coefficients_from_json(read_json_file(flags.coeffs));
    }
    PCSState pcs{*coeffs, PCSParams{flags.p, flags.lambda}};
    validate(pcs.params);
    write_text(cfg.output, state_to_json(pcs).dump(2) + "\n", out);
    err << "normalization residual: " << format_number(std::abs(pcs.coeffs.a().squaredNorm() - 1.0)) << "\n";
    return kExitOk;
}

int cmd_reduce(const RunConfig& cfg, const std::vector<int>& trace, std::ostream& out, std::ostream& err) {
    const PCSState pcs = load_state(cfg);
    PartySet traced;
    for (int t : trace) {
        if (t < 1 || t > pcs.coeffs.n()) throw InputError("--trace party out of range");
        traced.push_back(t - 1);
    }
    const PCSState reduced = reduce_pcs_symbolic(pcs, traced);
    write_text(cfg.output, state_to_json(reduced).dump(2) + "\n", out);
    err << "p' = " << format_number(reduced.params.p) << ", lambda' = " << format_number(reduced.params.lambda) << "\n";
    return kExitOk;
}

Json measure_json(const MeasureValue& v) {
    return Json{{"value", v.value}, {"method", std::string(to_string(v.method))}};
}

int cmd_measure(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const PCSState pcs = load_state(cfg);
    const int n = pcs.coeffs.n();
    const int focus = focus_index(cfg, n);
    Json j{{"focus", focus + 1}};
    const RoofOptions roof = cfg.roof();
    const DensityMatrix rho = build_pcs(pcs);
    if (n >= 2) {
        j["one_vs_rest"] = measure_json(cfg.force_generic ? scren_mixed(rho, {focus}, roof)
                                                          : scren_pcs_one_vs_rest(pcs, focus));
    }
    Json pairs = Json::array();
    for (int other = 0; other < n; ++other) {
        if (other == focus || n < 3) continue;
        const PartySet keep{std::min(focus, other), std::max(focus, other)};
        RoofOptions local = roof;
        local.seed = derive_seed(cfg.seed, keep);
        const MeasureValue v = cfg.force_generic ? scren_mixed(partial_trace(rho, keep), {focus < other ? 0 : 1}, local)
                                                 : scren_pcs_pair(pcs, focus, other);
        Json entry = measure_json(v);
        entry["parties"] = Json::array({focus + 1, other + 1});
        pairs.push_back(std::move(entry));
    }
    j["pairs"] = std::move(pairs);
    write_text(cfg.output, j.dump(2) + "\n", out);
    return kExitOk;
}

int report_exit(const MonogamyReport& rep, std::ostream& err) {
    if (!rep.converged()) {
        err << "optimizer did not converge on at least one term\n";
        return kExitInputError;
    }
    if (!rep.pass) {
        err << to_string(rep.claim) << " check failed: residual " << format_number(rep.residual) << " (tolerance "
            << format_number(rep.tolerance) << ")\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, Claim claim, std::ostream& out, std::ostream& err) {
    const PCSState pcs = load_state(cfg);
    const int focus = focus_index(cfg, pcs.coeffs.n());
    const MonogamyOptions mono = cfg.mono();
    MonogamyReport rep;
    try {
        rep = claim == Claim::ckw ? ckw_residual_scren(pcs, focus, mono) : strong_monogamy_residual(pcs, focus, mono);
    } catch (const MeasureViolation& v) {
        err << "violation: " << v.what() << "\n";
        return kExitCheckFailed;
    }
    write_text(cfg.output, report_to_json(rep).dump(2) + "\n", out);
    err << to_string(rep.claim) << " residual: " << format_number(rep.residual) << "\n";
    return report_exit(rep, err);
}

int cmd_verify_all(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const PCSState pcs = load_state(cfg);
    VerifyOptions opts;
    opts.mono = cfg.mono();
    opts.focus = focus_index(cfg, pcs.coeffs.n());
    opts.closed_tol = cfg.closed_tol;
    opts.optimizer_tol = cfg.optimizer_tol;
    opts.zero_tol = cfg.zero_tol;
    const auto report = verify_pcs(pcs, opts);
    write_text(cfg.output, verification_to_json(report).dump(2) + "\n", out);
    for (const auto& c : report.checks) {
        err << (c.passed ? "PASS " : "FAIL ") << c.name << " metric=" << format_number(c.metric) << "\n";
    }
    return report.all_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_channel(const RunConfig& cfg, std::optional<double> lambda, std::ostream& out, std::ostream& err) {
    PCSState pcs = load_state(cfg);
    if (lambda) pcs.params.lambda = *lambda;
    validate(pcs.params);
    const PureState psi = build_coherent_superposition(pcs.coeffs, pcs.params.p);
    const DensityMatrix damped = phase_damp(psi, pcs.params.lambda);
    const double residual = max_abs_entry(damped.entries() - build_pcs(pcs).entries());
    Json j = state_to_json(pcs);
    j["residual"] = residual;
    j["rho"] = matrix_to_json(damped.entries());
    write_text(cfg.output, j.dump(2) + "\n", out);
    err << "entrywise residual: " << format_number(residual) << "\n";
    if (residual > kChannelTol) {
        err << "damped state does not match the PCS form\n";
        return kExitInputError;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
    int index = 0;
    int n = 0;
    int d = 0;
    double p = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double lhs = 0.0;
    double pairwise = 0.0;
    double sm_sum = 0.0;
    double ckw_residual = 0.0;
    double sm_residual = 0.0;
    double spread = 0.0;
    std::string error;
    bool failed = false;
};

void run_row(SweepRow& row, const RunConfig& cfg) {
    try {
        const auto coeffs = sample_random_wclass(row.n, row.d, row.seed);
        std::mt19937_64 rng(splitmix64(row.seed));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        row.p = unit(rng);
        row.lambda = unit(rng);
        const PCSState pcs{coeffs, PCSParams{row.p, row.lambda}};

        MonogamyOptions mono = cfg.mono();
        mono.roof.seed = row.seed;
        mono.roof.threads = 1;
        mono.nested.seed = splitmix64(row.seed);
        const auto ckw = ckw_residual_scren(pcs, 0, mono);
        const auto sm = strong_monogamy_residual(pcs, 0, mono);
        row.lhs = ckw.lhs;
        row.pairwise = ckw.term_sum();
        row.sm_sum = sm.term_sum();
        row.ckw_residual = ckw.residual;
        row.sm_residual = sm.residual;

        const Decomposition eigen = eigen_ensemble(build_pcs(pcs));
        const PureMeasure measure = [](const PureState& psi) { return scren_pure_value(psi, {0}); };
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int k = 0; k < 8; ++k) {
            const double v = roof_objective(hjw_decomposition(eigen, random_unitary(static_cast<int>(eigen.size()) + 1, rng)), measure);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        row.spread = hi - lo;
        row.failed = !ckw.pass || !sm.pass;
    } catch (const std::exception& e) {
        row.error = e.what();
        std::replace(row.error.begin(), row.error.end(), ',', ';');
        std::replace(row.error.begin(), row.error.end(), '\n', ' ');
        row.failed = true;
    }
}

struct SweepFlags {
    std::vector<int> ns{3};
    std::vector<int> ds{2};
    int samples = 100;
};

int cmd_sweep(const RunConfig& cfg, const SweepFlags& flags, std::ostream& out, std::ostream& err) {
    if (flags.samples < 0) throw InputError("--samples must be >= 0");
    for (int n : flags.ns) {
        if (n < 3 || n > 6) throw InputError("sweep party counts must lie in 3..6");
    }
    for (int d : flags.ds) {
        if (d < 2 || d > 4) throw InputError("sweep local dimensions must lie in 2..4");
    }
    std::vector<SweepRow> rows;
    for (int n : flags.ns) {
        for (int d : flags.ds) {
            for (int s = 0; s < flags.samples; ++s) {
                SweepRow row;
                row.index = static_cast<int>(rows.size());
                row.n = n;
                row.d = d;
                row.seed = derive_seed(cfg.seed, {row.index});
                rows.push_back(row);
            }
        }
    }

    const int workers = std::clamp(cfg.threads, 1, std::max<int>(1, static_cast<int>(rows.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) run_row(rows[k], cfg);
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::ostringstream csv;
    csv << "index,n,d,p,lambda,seed,lhs,pairwise_sum,sm_sum,ckw_residual,sm_residual,spread,error\n";
    int failures = 0;
    for (const auto& r : rows) {
        failures += r.failed ? 1 : 0;
        csv << r.index << ',' << r.n << ',' << r.d << ',' << format_number(r.p) << ',' << format_number(r.lambda) << ','
            << r.seed << ',' << format_number(r.lhs) << ',' << format_number(r.pairwise) << ','
            << format_number(r.sm_sum) << ',' << format_number(r.ckw_residual) << ','
            << format_number(r.sm_residual) << ',' << format_number(r.spread) << ',' << r.error << '\n';
    }
    write_text(cfg.output, csv.str(), out);
    if (failures > 0) {
        err << failures << " of " << rows.size() << " rows failed\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monogamy and strong-monogamy checks for partially coherent W-class superpositions", "pcsmono"};
    app.require_subcommand(1);

    RunConfig cfg;
    try {
        cfg.threads = default_threads();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    BuildFlags build_flags;
    auto* build = app.add_subcommand("build", "Write a PCS state file");
    build->add_option("--standard-w", build_flags.standard, "Standard W coefficients: N D")->expected(2);
    build->add_option("--random", build_flags.random, "Random W-class coefficients: N D")->expected(2);
    build->add_option("--coeffs", build_flags.coeffs, "Coefficient JSON with n, d, a");
    build->add_option("--p", build_flags.p, "W weight p in [0, 1]");
    build->add_option("--lambda", build_flags.lambda, "Degree of coherency in [0, 1]");
    build->add_option("--seed", cfg.seed, "Seed for --random");
    build->add_option("-o,--output", cfg.output, "Output path, '-' for stdout");

    std::vector<int> trace;
    auto* reduce = app.add_subcommand("reduce", "Trace out parties symbolically");
    add_io_flags(reduce, cfg, true);
    reduce->add_option("--trace", trace, "1-based parties to trace out")->required();

    auto* measure = app.add_subcommand("measure", "One-vs-rest and pairwise SCREN of a state file");
    add_io_flags(measure, cfg, true);
    measure->add_option("--focus", cfg.focus, "1-based focus party");
    add_optimizer_flags(measure, cfg);

    auto* verify_mono = app.add_subcommand("verify-monogamy", "Check saturation of the SCREN monogamy relation");
    auto* verify_strong = app.add_subcommand("verify-strong", "Check saturation of the SCREN strong monogamy relation");
    auto* verify_all = app.add_subcommand("verify-all", "Run every PCS check and emit a combined report");
    for (auto* cmd : {verify_mono, verify_strong, verify_all}) {
        add_io_flags(cmd, cfg, true);
        cmd->add_option("--focus", cfg.focus, "1-based focus party");
        add_optimizer_flags(cmd, cfg);
    }

    std::optional<double> channel_lambda;
    auto* channel = app.add_subcommand("channel", "Phase-damp the coherent superposition of a state file");
    add_io_flags(channel, cfg, true);
    channel->add_option("--lambda", channel_lambda, "Channel parameter; defaults to the file's lambda");

    SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Randomized monogamy sweep to CSV");
    sweep->add_option("--n", sweep_flags.ns, "Party counts")->delimiter(',');
    sweep->add_option("--d", sweep_flags.ds, "Local dimensions")->delimiter(',');
    sweep->add_option("--samples", sweep_flags.samples, "Samples per (n, d)");
    sweep->add_option("-o,--output", cfg.output, "Output path, '-' for stdout");
    add_optimizer_flags(sweep, cfg);

    std::vector<const char*> argv{"pcsmono"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInputError;
    }

    try {
        cfg.validate();
        if (*build) return cmd_build(cfg, build_flags, out, err);
        if (*reduce) return cmd_reduce(cfg, trace, out, err);
        if (*measure) return cmd_measure(cfg, out, err);
        if (*verify_mono) return cmd_verify(cfg, Claim::ckw, out, err);
        if (*verify_strong) return cmd_verify(cfg, Claim::sm, out, err);
        if (*verify_all) return cmd_verify_all(cfg, out, err);
        if (*channel) return cmd_channel(cfg, channel_lambda, out, err);
        if (*sweep) return cmd_sweep(cfg, sweep_flags, out, err);
    } catch (const MeasureViolation& e) {
        err << "violation: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace pcsmono
