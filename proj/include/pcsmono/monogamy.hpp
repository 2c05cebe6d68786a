#pragma once

// Monogamy (CKW-type) and strong-monogamy machinery for SCREN.
//
// For a focus party f, the strong-monogamy sum runs over every level m = 2..n-1
// and every (m-1)-element subset j of the other parties, listed once in ascending
// order, and adds (m-SCREN of the marginal on {f} u j)^(m/2). The n-SCREN of a
// pure state is the one-vs-rest SCREN minus that sum.

#include "pcsmono/convex_roof.hpp"
#include "pcsmono/measures.hpp"
#include "pcsmono/states.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pcsmono {

struct IndexVector {
    int m = 2;
    /// The m-1 non-focus parties, ascending, 0-based.
    PartySet parties;

    bool operator==(const IndexVector&) const = default;
};

std::vector<IndexVector> enumerate_index_vectors(int n, int focus, int m);

enum class Claim { ckw, sm, nscren_zero, reduction };

std::string_view to_string(Claim c);

struct MonogamyTerm {
    IndexVector index;
    /// m-SCREN of the marginal, clamped at zero.
    double value = 0.0;
    Method method = Method::closed_form;
    std::string detail;
    bool converged = true;

    double exponent() const { return index.m / 2.0; }
    double contribution() const;
};

struct MonogamyReport {
    Claim claim = Claim::ckw;
    int focus = 0;
    double lhs = 0.0;
    Method lhs_method = Method::closed_form;
    bool lhs_converged = true;
    std::vector<MonogamyTerm> terms;
    /// lhs - sum of term contributions; >= 0 means the inequality holds.
    double residual = 0.0;
    bool pass = false;
    double tolerance = 0.0;
    std::uint64_t seed = 0;

    double term_sum() const;
    /// False if any optimizer-backed quantity finished without a converged start.
    bool converged() const;
    /// Recomputes the residual from lhs and terms.
    double recompute_residual() const;
};

struct MonogamyOptions {
    /// Convex-roof searches issued directly by a monogamy computation.
    RoofOptions roof;
    /// Convex-roof searches evaluated inside another roof objective (nested n-SCREN).
    RoofOptions nested = nested_defaults();
    /// Disables PCS recognition so that every term goes through the optimizer.
    bool force_generic = false;
    double tolerance = 1e-6;
    /// Largest party count accepted by the recursive n-SCREN.
    int max_parties = 6;

    static RoofOptions nested_defaults();
};

/// One-vs-rest SCREN against the sum of pairwise SCRENs. PCS sources use closed forms
/// unless force_generic is set; `pass` means saturation (|residual| <= tolerance).
MonogamyReport ckw_residual_scren(const PCSState& pcs, int focus, const MonogamyOptions& opts);
/// Pure sources: `pass` means the inequality holds (residual >= -tolerance).
MonogamyReport ckw_residual_scren(const PureState& psi, int focus, const MonogamyOptions& opts);

/// Full strong-monogamy report. PCS sources: `pass` means saturation.
MonogamyReport strong_monogamy_residual(const PCSState& pcs, int focus, const MonogamyOptions& opts);
/// Pure sources: `pass` means the inequality holds.
MonogamyReport strong_monogamy_residual(const PureState& psi, int focus, const MonogamyOptions& opts);

/// Signed n-SCREN of a pure state. Not clamped; `violation` is set below kViolationFloor.
MeasureValue multiparty_scren_pure(const PureState& psi, int focus, const MonogamyOptions& opts);

/// Convex roof of the pure n-SCREN. Throws MeasureViolation if an ensemble member
/// has n-SCREN below kViolationFloor.
MeasureValue multiparty_scren_mixed(const DensityMatrix& rho, int focus, const MonogamyOptions& opts);

struct CheckResult {
    std::string name;
    bool passed = false;
    /// The measured deviation compared against `tolerance`.
    double metric = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    MonogamyOptions mono;
    int focus = 0;
    double closed_tol = 1e-10;
    double optimizer_tol = 1e-4;
    double zero_tol = 1e-6;
    int hjw_probes = 32;
    int max_parties = 6;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::vector<MonogamyReport> reports;

    bool all_passed() const;
};

/// Runs the reduction-law, coherence-independence, decomposition-independence,
/// monogamy saturation, strong-monogamy saturation and zero n-SCREN checks.
/// Failures inside a check are recorded, not thrown.
VerificationReport verify_pcs(const PCSState& pcs, const VerifyOptions& opts);

}  // namespace pcsmono
