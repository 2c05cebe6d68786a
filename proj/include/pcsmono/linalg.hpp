#pragma once

// Dense complex linear algebra over multipartite tensor-product layouts.
//
// Basis convention: mixed-radix, row-major, party 0 is the most significant
// digit. Party indices in this API are 0-based.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcsmono {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Sorted list of 0-based party indices.
using PartySet = std::vector<int>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kNormTol = 1e-12;

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SubsystemLayout {
public:
    SubsystemLayout() = default;
    explicit SubsystemLayout(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    int parties() const { return static_cast<int>(dims_.size()); }
    int dim(int party) const { return dims_.at(static_cast<std::size_t>(party)); }
    std::size_t total_dim() const { return total_; }

    /// Product of the local dimensions of `set`.
    std::size_t dim_of(const PartySet& set) const;
    /// Layout restricted to `set`, in original party order.
    SubsystemLayout restrict_to(const PartySet& set) const;
    /// Basis index of a digit string.
    std::size_t index_of(std::span<const int> digits) const;
    /// Digit string of a basis index.
    std::vector<int> digits_of(std::size_t index) const;
    /// Stride of the party digit inside a basis index.
    std::size_t stride(int party) const;

    /// Complement of `set` in ascending order.
    PartySet complement(const PartySet& set) const;
    /// Throws unless `set` is non-empty, in range and duplicate-free. Returns it sorted.
    PartySet validate(PartySet set) const;
    /// Same as validate() but also rejects the full party set.
    PartySet validate_proper(PartySet set) const;

    bool operator==(const SubsystemLayout&) const = default;

private:
    std::vector<int> dims_;
    std::size_t total_ = 0;
};

class PureState {
public:
    PureState(SubsystemLayout layout, Vector amplitudes);

    const SubsystemLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amplitudes_; }
    Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

private:
    SubsystemLayout layout_;
    Vector amplitudes_;
};

/// Normalizes `v` and wraps it. Throws on a zero vector.
PureState normalized_state(SubsystemLayout layout, Vector v);

class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and positivity.
    DensityMatrix(SubsystemLayout layout, Matrix entries);

    /// Skips the spectral positivity check; Hermiticity and trace are still enforced.
    /// For matrices produced by validity-preserving maps (partial trace, regrouping).
    static DensityMatrix from_trusted(SubsystemLayout layout, Matrix entries);

    static DensityMatrix from_pure(const PureState& psi);

    const SubsystemLayout& layout() const { return layout_; }
    const Matrix& entries() const { return entries_; }

private:
    struct Trusted {};
    DensityMatrix(SubsystemLayout layout, Matrix entries, Trusted);

    SubsystemLayout layout_;
    Matrix entries_;
};

class PartitionMap {
public:
    PartitionMap(std::vector<PartySet> groups, int parties);
    /// Each party in its own group.
    static PartitionMap singletons(int parties);

    const std::vector<PartySet>& groups() const { return groups_; }
    int parties() const { return parties_; }
    /// Party order after concatenating the groups.
    PartySet flattened() const;

private:
    std::vector<PartySet> groups_;
    int parties_;
};

struct EigenDecomposition {
    RealVector values;  // descending
    Matrix vectors;     // columns, matching `values`
};

double max_abs_entry(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);

EigenDecomposition eigendecompose_hermitian(const Matrix& h, double tol = kPsdTol);

/// Reorders the basis so that `order` (a permutation of all parties) becomes the new party order.
Vector permute_parties(const Vector& v, const SubsystemLayout& layout, const PartySet& order);
Matrix permute_parties(const Matrix& m, const SubsystemLayout& layout, const PartySet& order);

DensityMatrix partial_trace(const DensityMatrix& rho, PartySet keep);
/// Marginal of a pure state on `keep`, computed without forming the full projector.
DensityMatrix marginal(const PureState& psi, PartySet keep);

Matrix partial_transpose(const Matrix& m, const SubsystemLayout& layout, PartySet subset);
Matrix partial_transpose(const DensityMatrix& rho, PartySet subset);

double trace_norm(const Matrix& h);

/// Descending Schmidt coefficients across `cut` | complement; min(dim_cut, dim_rest) entries.
RealVector schmidt_coefficients(const PureState& psi, PartySet cut);

PureState merge_parties(const PureState& psi, const PartitionMap& pmap);
DensityMatrix merge_parties(const DensityMatrix& rho, const PartitionMap& pmap);

/// Embeds each party into a larger local space; basis label k stays label k.
PureState embed_local_dims(const PureState& psi, const std::vector<int>& dims);

}  // namespace pcsmono
