#include "pcsmono/monogamy.hpp"

#include "pcsmono/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>

namespace pcsmono {

std::string_view to_string(Claim c) {
    switch (c) {
        case Claim::ckw: return "ckw";
        case Claim::sm: return "sm";
        case Claim::nscren_zero: return "nscren_zero";
        case Claim::reduction: return "reduction";
    }
    return "unknown";
}

std::vector<IndexVector> enumerate_index_vectors(int n, int focus, int m) {
    if (n < 3) throw InvalidArgument("index vectors need at least three parties");
    if (focus < 0 || focus >= n) throw InvalidArgument("focus party out of range");
    if (m < 2 || m > n - 1) throw InvalidArgument("index vector level m must satisfy 2 <= m <= n-1");
    PartySet others;
    for (int p = 0; p < n; ++p) {
        if (p != focus) others.push_back(p);
    }
    const int k = m - 1;
    // lexicographic k-subsets of `others`
    std::vector<IndexVector> out;
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) pick[static_cast<std::size_t>(t)] = t;
    const int pool = static_cast<int>(others.size());
    while (true) {
        IndexVector iv{m, {}};
        for (int t : pick) iv.parties.push_back(others[static_cast<std::size_t>(t)]);
        out.push_back(std::move(iv));
        int t = k - 1;
        while (t >= 0 && pick[static_cast<std::size_t>(t)] == pool - k + t) --t;
        if (t < 0) break;
        ++pick[static_cast<std::size_t>(t)];
        for (int u = t + 1; u < k; ++u) pick[static_cast<std::size_t>(u)] = pick[static_cast<std::size_t>(u - 1)] + 1;
    }
    return out;
}

double MonogamyTerm::contribution() const {
    return std::pow(std::max(value, 0.0), exponent());
}

double MonogamyReport::term_sum() const {
    double s = 0.0;
    for (const auto& t : terms) s += t.contribution();
    return s;
}

bool MonogamyReport::converged() const {
    return lhs_converged && std::all_of(terms.begin(), terms.end(), [](const MonogamyTerm& t) { return t.converged; });
}

double MonogamyReport::recompute_residual() const {
    return lhs - term_sum();
}

RoofOptions MonogamyOptions::nested_defaults() {
    RoofOptions r;
    r.size_offsets = {0};
    r.starts = 1;
    r.restarts = 0;
    r.max_iter = 400;
    return r;
}

namespace {

PartySet marginal_parties(int focus, const IndexVector& iv) {
    PartySet keep = iv.parties;
    keep.push_back(focus);
    std::sort(keep.begin(), keep.end());
    return keep;
}

int position_of(const PartySet& keep, int party) {
    return static_cast<int>(std::find(keep.begin(), keep.end(), party) - keep.begin());
}

void check_parties(int n, int focus, const MonogamyOptions& opts) {
    if (n < 3) throw InvalidArgument("monogamy relations need at least three parties");
    if (n > opts.max_parties) {
        throw InvalidArgument("party count " + std::to_string(n) + " exceeds the configured cap " +
                              std::to_string(opts.max_parties));
    }
    if (focus < 0 || focus >= n) throw InvalidArgument("focus party out of range");
}

MonogamyOptions with_seed(const MonogamyOptions& opts, std::uint64_t seed) {
    MonogamyOptions out = opts;
    out.roof.seed = seed;
    out.nested.seed = splitmix64(seed);
    return out;
}

// m-SCREN of a marginal, with the focus at position `fpos` inside it.
MonogamyTerm marginal_term(const DensityMatrix& marg, int fpos, const IndexVector& iv, const MonogamyOptions& opts,
                           std::uint64_t seed) {
    MonogamyTerm term{iv, 0.0, Method::closed_form, {}};
    if (!opts.force_generic) {
        if (const auto pcs = recognize_pcs(marg)) {
            if (iv.m == 2) {
                term.value = scren_pcs_one_vs_rest(*pcs, fpos).value;
                term.detail = "recognized PCS marginal";
            } else {
                term.detail = "recognized PCS marginal: zero n-SCREN";
            }
            return term;
        }
    }
    const auto local = with_seed(opts, seed);
    const MeasureValue mv = iv.m == 2 ? scren_mixed(marg, {fpos}, local.roof) : multiparty_scren_mixed(marg, fpos, local);
    term.value = mv.value;
    term.method = mv.method;
    term.detail = mv.detail;
    term.converged = mv.converged;
    return term;
}

MonogamyReport pure_report(const PureState& psi, int focus, const MonogamyOptions& opts, Claim claim) {
    const int n = psi.layout().parties();
    check_parties(n, focus, opts);
    MonogamyReport rep;
    rep.claim = claim;
    rep.focus = focus;
    rep.seed = opts.roof.seed;
    rep.tolerance = opts.tolerance;
    rep.lhs = scren_pure(psi, {focus}).value;
    rep.lhs_method = Method::spectral;
    const int top = claim == Claim::ckw ? 2 : n - 1;
    for (int m = 2; m <= top; ++m) {
        for (const auto& iv : enumerate_index_vectors(n, focus, m)) {
            const PartySet keep = marginal_parties(focus, iv);
            const DensityMatrix marg = marginal(psi, keep);
            const auto seed = derive_seed(opts.roof.seed, keep);
            rep.terms.push_back(marginal_term(marg, position_of(keep, focus), iv, opts, seed));
        }
    }
    rep.residual = rep.recompute_residual();
    rep.pass = rep.residual >= -opts.tolerance;
    return rep;
}

MonogamyReport pcs_report(const PCSState& pcs, int focus, const MonogamyOptions& opts, Claim claim) {
    const int n = pcs.coeffs.n();
    check_parties(n, focus, opts);
    validate(pcs.params);
    MonogamyReport rep;
    rep.claim = claim;
    rep.focus = focus;
    rep.seed = opts.roof.seed;
    rep.tolerance = opts.tolerance;
    const int top = claim == Claim::ckw ? 2 : n - 1;

    if (!opts.force_generic) {
        rep.lhs = scren_pcs_one_vs_rest(pcs, focus).value;
        rep.lhs_method = Method::closed_form;
        for (int m = 2; m <= top; ++m) {
            for (const auto& iv : enumerate_index_vectors(n, focus, m)) {
                MonogamyTerm term{iv, 0.0, Method::closed_form, {}};
                if (claim == Claim::ckw) {
                    term.value = scren_pcs_pair(pcs, focus, iv.parties.front()).value;
                } else {
                    const PartySet keep = marginal_parties(focus, iv);
                    try {
                        const PCSState reduced = restrict_pcs(pcs, keep);
                        if (m == 2) {
                            term.value = scren_pcs_one_vs_rest(reduced, position_of(keep, focus)).value;
                        } else {
                            term.detail = "PCS marginal: zero n-SCREN";
                        }
                    } catch (const DegenerateReduction&) {
                        term.detail = "vacuum marginal";
                    }
                }
                rep.terms.push_back(std::move(term));
            }
        }
    } else {
        const DensityMatrix rho = build_pcs(pcs);
        const auto lhs = scren_mixed(rho, {focus}, with_seed(opts, derive_seed(opts.roof.seed, {-1})).roof);
        rep.lhs = lhs.value;
        rep.lhs_method = lhs.method;
        rep.lhs_converged = lhs.converged;
        for (int m = 2; m <= top; ++m) {
            for (const auto& iv : enumerate_index_vectors(n, focus, m)) {
                const PartySet keep = marginal_parties(focus, iv);
                const DensityMatrix marg = partial_trace(rho, keep);
                const auto seed = derive_seed(opts.roof.seed, keep);
                rep.terms.push_back(marginal_term(marg, position_of(keep, focus), iv, opts, seed));
            }
        }
    }
    rep.residual = rep.recompute_residual();
    rep.pass = std::abs(rep.residual) <= opts.tolerance;
    return rep;
}

}  // namespace

MonogamyReport ckw_residual_scren(const PCSState& pcs, int focus, const MonogamyOptions& opts) {
    return pcs_report(pcs, focus, opts, Claim::ckw);
}

MonogamyReport ckw_residual_scren(const PureState& psi, int focus, const MonogamyOptions& opts) {
    return pure_report(psi, focus, opts, Claim::ckw);
}

MonogamyReport strong_monogamy_residual(const PCSState& pcs, int focus, const MonogamyOptions& opts) {
    return pcs_report(pcs, focus, opts, Claim::sm);
}

MonogamyReport strong_monogamy_residual(const PureState& psi, int focus, const MonogamyOptions& opts) {
    return pure_report(psi, focus, opts, Claim::sm);
}

MeasureValue multiparty_scren_pure(const PureState& psi, int focus, const MonogamyOptions& opts) {
    const auto rep = pure_report(psi, focus, opts, Claim::sm);
    MeasureValue out;
    out.value = rep.residual;
    out.method = Method::spectral;
    for (const auto& t : rep.terms) {
        if (t.method == Method::optimizer) out.method = Method::optimizer;
    }
    out.violation = rep.residual < kViolationFloor;
    out.converged = rep.converged();
    std::ostringstream detail;
    detail << "lhs=" << rep.lhs << " terms=" << rep.terms.size() << " sum=" << rep.term_sum();
    out.detail = detail.str();
    return out;
}

MeasureValue multiparty_scren_mixed(const DensityMatrix& rho, int focus, const MonogamyOptions& opts) {
    const int n = rho.layout().parties();
    check_parties(n, focus, opts);
    if (!opts.force_generic) {
        if (recognize_pcs(rho)) return MeasureValue{0.0, Method::closed_form, "recognized PCS: zero n-SCREN"};
    }
    MonogamyOptions inner = opts;
    inner.roof = opts.nested;
    const PureMeasure measure = [focus, inner](const PureState& psi) {
        return multiparty_scren_pure(psi, focus, inner).value;
    };
    const auto res = minimize_roof(rho, measure, opts.roof);
    std::ostringstream detail;
    detail << "starts=" << res.starts << " converged=" << res.converged_starts << " spread=" << res.spread
           << " evaluations=" << res.evaluations;
    auto out = MeasureValue::nonnegative(res.value, Method::optimizer, detail.str());
    out.converged = res.converged_starts > 0 || res.starts == 0;
    return out;
}

// ---------------------------------------------------------------------------
// Verification bundle

bool VerificationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

template <class Fn>
void run_check(VerificationReport& out, const std::string& name, double tolerance, Fn&& fn) {
    CheckResult check{name, false, 0.0, tolerance, {}};
    try {
        fn(check);
    } catch (const std::exception& e) {
        check.passed = false;
        check.detail = std::string("error: ") + e.what();
    }
    out.checks.push_back(std::move(check));
}

}  // namespace

VerificationReport verify_pcs(const PCSState& pcs, const VerifyOptions& opts) {
    VerificationReport out;
    const int n = pcs.coeffs.n();
    const int focus = opts.focus;
    if (n > opts.max_parties) {
        out.checks.push_back({"size", false, static_cast<double>(n), static_cast<double>(opts.max_parties),
                              "party count exceeds the configured cap"});
        return out;
    }
    const bool generic = opts.mono.force_generic;
    const double monogamy_tol = generic ? opts.optimizer_tol : opts.closed_tol;

    run_check(out, "reduction_law", 1e-12, [&](CheckResult& c) {
        if (n < 2) {
            c.passed = true;
            c.detail = "single party: nothing to trace";
            return;
        }
        const DensityMatrix rho = build_pcs(pcs);
        bool monotone = true;
        for (int t = 0; t < n; ++t) {
            const PartySet keep = pcs.coeffs.layout().complement({t});
            const Matrix numeric = partial_trace(rho, keep).entries();
            try {
                const PCSState reduced = reduce_pcs_symbolic(pcs, {t});
                c.metric = std::max(c.metric, max_abs_entry(build_pcs(reduced).entries() - numeric));
                monotone = monotone && reduced.params.p <= pcs.params.p && reduced.params.lambda <= pcs.params.lambda;
            } catch (const DegenerateReduction&) {
                Matrix vac = Matrix::Zero(numeric.rows(), numeric.cols());
                vac(0, 0) = 1.0;
                c.metric = std::max(c.metric, max_abs_entry(numeric - vac));
            }
        }
        c.passed = monotone && c.metric <= c.tolerance;
        if (!monotone) c.detail = "p' <= p or lambda' <= lambda violated";
    });

    run_check(out, "lambda_independence", 0.0, [&](CheckResult& c) {
        const double lambdas[] = {0.0, 0.3, 0.7, 1.0};
        double first = 0.0;
        for (std::size_t k = 0; k < std::size(lambdas); ++k) {
            PCSState probe{pcs.coeffs, PCSParams{pcs.params.p, lambdas[k]}};
            const double v = scren_pcs_one_vs_rest(probe, focus).value;
            if (k == 0) first = v;
            c.metric = std::max(c.metric, std::abs(v - first));
        }
        c.passed = c.metric == 0.0;
        c.detail = "closed form at lambda in {0, 0.3, 0.7, 1}";
    });

    if (generic) {
        run_check(out, "lambda_independence_optimizer", opts.optimizer_tol, [&](CheckResult& c) {
            const double lambdas[] = {0.0, 0.3, 0.7, 1.0};
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (double lam : lambdas) {
                PCSState probe{pcs.coeffs, PCSParams{pcs.params.p, lam}};
                const double v = scren_mixed(build_pcs(probe), {focus}, opts.mono.roof).value;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            c.metric = hi - lo;
            c.passed = c.metric <= c.tolerance;
        });
    }

    run_check(out, "decomposition_independence", 1e-9, [&](CheckResult& c) {
        if (n < 2) {
            c.passed = true;
            c.detail = "single party: no cut";
            return;
        }
        const Decomposition eigen = eigen_ensemble(build_pcs(pcs));
        const PartySet cut{focus};
        const PureMeasure measure = [cut](const PureState& psi) { return scren_pure_value(psi, cut); };
        std::mt19937_64 rng(derive_seed(opts.mono.roof.seed, {-2}));
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        const int r = static_cast<int>(eigen.size()) + 1;
        for (int k = 0; k < opts.hjw_probes; ++k) {
            const double v = roof_objective(hjw_decomposition(eigen, random_unitary(r, rng)), measure);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        c.metric = hi - lo;
        c.passed = c.metric <= c.tolerance;
        std::ostringstream detail;
        detail << "average sqrt(SCREN) = " << lo;
        c.detail = detail.str();
    });

    if (n >= 3) {
        MonogamyOptions mono = opts.mono;
        mono.tolerance = monogamy_tol;
        mono.max_parties = opts.max_parties;
        run_check(out, "ckw_saturation", monogamy_tol, [&](CheckResult& c) {
            auto rep = ckw_residual_scren(pcs, focus, mono);
            c.metric = std::abs(rep.residual);
            c.passed = rep.pass;
            out.reports.push_back(std::move(rep));
        });
        run_check(out, "sm_saturation", monogamy_tol, [&](CheckResult& c) {
            auto rep = strong_monogamy_residual(pcs, focus, mono);
            c.metric = std::abs(rep.residual);
            c.passed = rep.pass;
            out.reports.push_back(std::move(rep));
        });
        run_check(out, "nscren_zero", opts.zero_tol, [&](CheckResult& c) {
            const auto v = multiparty_scren_mixed(build_pcs(pcs), focus, mono);
            c.metric = v.value;
            c.passed = v.value <= c.tolerance;
            c.detail = v.detail;
            MonogamyReport rep;
            rep.claim = Claim::nscren_zero;
            rep.focus = focus;
            rep.lhs = v.value;
            rep.lhs_method = v.method;
            rep.residual = v.value;
            rep.pass = c.passed;
            rep.tolerance = c.tolerance;
            rep.seed = mono.roof.seed;
            out.reports.push_back(std::move(rep));
        });
    }
    return out;
}

}  // namespace pcsmono
