#pragma once

// Closed-form and spectral entanglement measures.
//
// Negativity uses the unnormalized convention ||rho^{T}||_1 - 1 (no division by d-1).
// SCREN is the square of the convex-roof extended negativity; for pure states it
// is simply the squared negativity.

#include "pcsmono/linalg.hpp"
#include "pcsmono/states.hpp"

#include <string>
#include <string_view>

namespace pcsmono {

enum class Method { closed_form, spectral, optimizer };

std::string_view to_string(Method m);

/// Values below this are treated as genuinely negative rather than roundoff.
inline constexpr double kClampFloor = -1e-9;

struct MeasureValue {
    double value = 0.0;
    Method method = Method::closed_form;
    std::string detail;
    /// Set when a signed quantity (n-SCREN) came out below the violation floor.
    bool violation = false;
    /// False when an optimizer produced the value without any start converging.
    bool converged = true;

    /// Clamps tiny negatives to zero; throws std::domain_error below kClampFloor.
    static MeasureValue nonnegative(double raw, Method method, std::string detail = {});
};

/// ||(psi psi^dag)^{T_rest}||_1 - 1 via the partial transpose spectrum.
MeasureValue negativity_pure(const PureState& psi, PartySet cut);
/// (sum_i s_i)^2 - 1 over the Schmidt coefficients s_i.
double negativity_from_schmidt(const PureState& psi, PartySet cut);

/// Squared negativity of a pure state across cut | complement.
MeasureValue scren_pure(const PureState& psi, PartySet cut);
/// Same quantity as a bare double, for use inside optimizers.
double scren_pure_value(const PureState& psi, const PartySet& cut);

/// 4 det(rho_cut) for a single-qubit cut side.
MeasureValue tangle_pure_qubit(const PureState& psi, int qubit);

/// SCREN of a PCS state between `focus` and all remaining parties:
/// 4 p^2 X_focus sum_{i != focus} X_i, with X_i the W weight of party i.
MeasureValue scren_pcs_one_vs_rest(const PCSState& pcs, int focus);
/// SCREN of the two-party marginal of a PCS state: 4 p^2 X_i X_j.
MeasureValue scren_pcs_pair(const PCSState& pcs, int i, int j);

}  // namespace pcsmono
