#pragma once

// Convex-roof extension engine.
//
// Every pure-state ensemble of a rank-k density matrix is a unitary mixture of
// its (zero-padded) eigen-ensemble. minimize_roof searches r x r unitaries,
// generated as exp(iH) from r^2 real parameters, with a multi-start simplex
// search and reports the squared minimal average of sqrt(measure).
//
// The result is an upper bound on the true convex roof. Sweeping r over
// rank..rank+2 is a heuristic: no general bound on the optimal ensemble size is used.

#include "pcsmono/linalg.hpp"
#include "pcsmono/measures.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcsmono {

/// Pure-state measures below this are reported as violations instead of being clamped.
inline constexpr double kViolationFloor = -1e-6;
/// Ensemble members lighter than this are dropped.
inline constexpr double kMemberWeightFloor = 1e-14;
/// Eigenvalues at or below this do not enter the eigen-ensemble.
inline constexpr double kRankFloor = 1e-12;

/// A pure-state measure went substantially negative on some ensemble member.
class MeasureViolation : public std::runtime_error {
public:
    explicit MeasureViolation(double value);
    double value() const { return value_; }

private:
    double value_;
};

struct DecompositionMember {
    double weight;
    PureState state;
};

struct Decomposition {
    std::vector<DecompositionMember> members;

    std::size_t size() const { return members.size(); }
    double total_weight() const;
    Matrix reconstruct() const;
};

using PureMeasure = std::function<double(const PureState&)>;

struct RoofOptions {
    /// Fixed ensemble size; when unset, sizes rank + offset are swept.
    std::optional<int> size;
    std::vector<int> size_offsets{0, 1, 2};
    int starts = 8;
    double tol = 1e-7;
    /// Objective evaluations per start.
    int max_iter = 2000;
    int restarts = 1;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct RoofResult {
    /// Squared minimal average.
    double value = 0.0;
    /// Minimal average of sqrt(measure).
    double objective = 0.0;
    Decomposition best;
    int starts = 0;
    int converged_starts = 0;
    /// max - min of the final objective over all starts.
    double spread = 0.0;
    long evaluations = 0;
    int best_size = 0;
    /// (r, best objective at that r)
    std::vector<std::pair<int, double>> by_size;

    bool converged() const { return converged_starts == starts; }
};

Decomposition eigen_ensemble(const DensityMatrix& rho);

/// Member h is proportional to sum_l U(h,l) sqrt(q_l)|e_l> over the eigen-ensemble
/// padded with zero vectors up to r = U.rows().
Decomposition hjw_decomposition(const DensityMatrix& rho, const Matrix& u);
Decomposition hjw_decomposition(const Decomposition& eigen, const Matrix& u);

/// exp(iH) with H Hermitian built from r^2 reals: diagonal first, then (re, im) of the upper triangle.
Matrix unitary_from_parameters(std::span<const double> params, int r);
/// Haar-random unitary.
Matrix random_unitary(int r, std::mt19937_64& rng);

/// sum_h w_h sqrt(max(measure_h, 0)); throws MeasureViolation below kViolationFloor.
double roof_objective(const Decomposition& dec, const PureMeasure& measure);

RoofResult minimize_roof(const DensityMatrix& rho, const PureMeasure& measure, const RoofOptions& opts);

/// Mixed-state SCREN across cut | complement, by convex-roof minimization.
RoofResult roof_scren(const DensityMatrix& rho, PartySet cut, const RoofOptions& opts);
MeasureValue scren_mixed(const DensityMatrix& rho, PartySet cut, const RoofOptions& opts);

}  // namespace pcsmono
