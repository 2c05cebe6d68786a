#pragma once

// Generalized W-class states, partially coherent superpositions (PCS) of a
// W-class state with the vacuum, and the phase-damping channel.

#include "pcsmono/linalg.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace pcsmono {

/// Coefficients a(i, j-1) of the W-class state sum_{i,j} a_ij |0..j..0>, levels j = 1..d-1.
class WClassCoefficients {
public:
    /// `a` has one row per party and d-1 columns. Must be normalized within 1e-12.
    explicit WClassCoefficients(Matrix a, int d);

    int n() const { return static_cast<int>(a_.rows()); }
    int d() const { return d_; }
    const Matrix& a() const { return a_; }

    /// W weight carried by one party: sum_j |a_ij|^2.
    double weight(int party) const;
    /// Sum of weight() over `parties`.
    double weight(const PartySet& parties) const;

    SubsystemLayout layout() const;
    /// Standard W state over n parties of dimension d with a_i1 = 1/sqrt(n).
    static WClassCoefficients standard(int n, int d = 2);

private:
    Matrix a_;
    int d_;
};

struct PCSParams {
    double p = 1.0;
    double lambda = 1.0;
};

void validate(const PCSParams& params);

struct PCSState {
    WClassCoefficients coeffs;
    PCSParams params;
};

class DegenerateReduction : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

PureState build_w_state(const WClassCoefficients& coeffs);
PureState build_vacuum(const SubsystemLayout& layout);
/// sqrt(p)|W> + sqrt(1-p)|0...0>
PureState build_coherent_superposition(const WClassCoefficients& coeffs, double p);
/// p|W><W| + (1-p)|0><0| + lambda*sqrt(p(1-p))(|W><0| + |0><W|)
DensityMatrix build_pcs(const PCSState& pcs);

/// Phase damping with Kraus operators sqrt(l) I, sqrt(1-l)(I - P0), sqrt(1-l) P0,
/// where P0 projects onto the vacuum.
DensityMatrix phase_damp(const PureState& psi, double lambda);

/// Symbolic marginal of a PCS state after tracing out `traced` (0-based, proper subset).
/// Kept parties stay in ascending order. Throws DegenerateReduction when the kept
/// parties carry no W weight.
PCSState reduce_pcs_symbolic(const PCSState& pcs, PartySet traced);

/// Same as reduce_pcs_symbolic, parameterized by the kept parties.
PCSState restrict_pcs(const PCSState& pcs, PartySet keep);

/// Coefficients of the coarse-grained W-class state for `pmap`, each merged party
/// embedded in the uniform local dimension d^(largest group size).
WClassCoefficients merge_wclass_coeffs(const WClassCoefficients& coeffs, const PartitionMap& pmap);

/// Uniform on the unit sphere of C^{n(d-1)}; deterministic in `seed`.
WClassCoefficients sample_random_wclass(int n, int d, std::uint64_t seed);

/// Removes the global phase: the largest-modulus entry (first in row-major order on ties)
/// becomes real positive.
Matrix canonical_phase(const Matrix& m);
/// Max entrywise distance between two coefficient sets modulo global phase.
double phase_insensitive_distance(const Matrix& a, const Matrix& b);

/// Structural test: returns the PCS parameters reproducing `rho` within `tol`
/// (entrywise), or nothing. Requires a uniform local dimension.
std::optional<PCSState> recognize_pcs(const DensityMatrix& rho, double tol = 1e-10);

}  // namespace pcsmono
