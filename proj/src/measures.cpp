#include "pcsmono/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace pcsmono {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::closed_form: return "closed_form";
        case Method::spectral: return "spectral";
        case Method::optimizer: return "optimizer";
    }
    return "unknown";
}

MeasureValue MeasureValue::nonnegative(double raw, Method method, std::string detail) {
    if (!(raw >= kClampFloor)) {
        throw std::domain_error("entanglement measure evaluated to " + std::to_string(raw));
    }
    return MeasureValue{std::max(raw, 0.0), method, std::move(detail)};
}

MeasureValue negativity_pure(const PureState& psi, PartySet cut) {
    const auto& layout = psi.layout();
    cut = layout.validate_proper(std::move(cut));
    const Matrix pt = partial_transpose(psi.projector(), layout, layout.complement(cut));
    return MeasureValue::nonnegative(trace_norm(pt) - 1.0, Method::spectral);
}

double negativity_from_schmidt(const PureState& psi, PartySet cut) {
    const RealVector s = schmidt_coefficients(psi, std::move(cut));
    const double sum = s.sum();
    return sum * sum - 1.0;
}

double scren_pure_value(const PureState& psi, const PartySet& cut) {
    const double n = std::max(negativity_from_schmidt(psi, cut), 0.0);
    return n * n;
}

MeasureValue scren_pure(const PureState& psi, PartySet cut) {
    cut = psi.layout().validate_proper(std::move(cut));
    return MeasureValue::nonnegative(scren_pure_value(psi, cut), Method::spectral);
}

MeasureValue tangle_pure_qubit(const PureState& psi, int qubit) {
    const auto& layout = psi.layout();
    const PartySet cut = layout.validate_proper({qubit});
    if (layout.dim(qubit) != 2) throw InvalidArgument("tangle needs a qubit on the cut side");
    const Matrix rho = marginal(psi, cut).entries();
    const double det = (rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0)).real();
    return MeasureValue::nonnegative(4.0 * det, Method::spectral);
}

MeasureValue scren_pcs_one_vs_rest(const PCSState& pcs, int focus) {
    validate(pcs.params);
    const int n = pcs.coeffs.n();
    if (focus < 0 || focus >= n) throw InvalidArgument("focus party out of range");
    double rest = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i != focus) rest += pcs.coeffs.weight(i);
    }
    const double p = pcs.params.p;
    return MeasureValue::nonnegative(4.0 * p * p * pcs.coeffs.weight(focus) * rest, Method::closed_form);
}

MeasureValue scren_pcs_pair(const PCSState& pcs, int i, int j) {
    validate(pcs.params);
    const int n = pcs.coeffs.n();
    if (i < 0 || i >= n || j < 0 || j >= n) throw InvalidArgument("party index out of range");
    if (i == j) throw InvalidArgument("pair SCREN needs two distinct parties");
    const double p = pcs.params.p;
    return MeasureValue::nonnegative(4.0 * p * p * (pcs.coeffs.weight(i) * pcs.coeffs.weight(j)), Method::closed_form);
}

}  // namespace pcsmono
