#include "pcsmono/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pcsmono {

namespace {

std::string describe(const PartySet& set) {
    std::ostringstream os;
    os << '{';
    for (std::size_t k = 0; k < set.size(); ++k) {
        os << (k ? "," : "") << set[k];
    }
    os << '}';
    return os.str();
}

// new_index[old] for the reordering that makes `order` the new party sequence.
std::vector<std::size_t> permutation_map(const SubsystemLayout& layout, const PartySet& order) {
    const int n = layout.parties();
    if (static_cast<int>(order.size()) != n) {
        throw InvalidArgument("party order must list every party exactly once");
    }
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (int p : order) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]++) {
            throw InvalidArgument("party order is not a permutation: " + describe(order));
        }
    }
    std::vector<int> new_dims(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        new_dims[static_cast<std::size_t>(k)] = layout.dim(order[static_cast<std::size_t>(k)]);
    }
    const SubsystemLayout target(new_dims);
    // stride in the new layout of each old party
    std::vector<std::size_t> new_stride(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        new_stride[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = target.stride(k);
    }

    const std::size_t total = layout.total_dim();
    std::vector<std::size_t> map(total);
    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    std::size_t idx = 0;
    for (std::size_t old = 0; old < total; ++old) {
        map[old] = idx;
        // increment the mixed-radix counter, least significant party last
        for (int p = n - 1; p >= 0; --p) {
            auto& dg = digits[static_cast<std::size_t>(p)];
            ++dg;
            idx += new_stride[static_cast<std::size_t>(p)];
            if (dg < layout.dim(p)) break;
            idx -= new_stride[static_cast<std::size_t>(p)] * static_cast<std::size_t>(dg);
            dg = 0;
        }
    }
    return map;
}

PartySet concat(const PartySet& a, const PartySet& b) {
    PartySet out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<int> dims) : dims_(std::move(dims)), total_(1) {
    if (dims_.empty()) throw InvalidArgument("layout needs at least one party");
    for (int d : dims_) {
        if (d < 2) throw InvalidArgument("every local dimension must be >= 2");
        total_ *= static_cast<std::size_t>(d);
    }
}

std::size_t SubsystemLayout::dim_of(const PartySet& set) const {
    std::size_t out = 1;
    for (int p : set) out *= static_cast<std::size_t>(dim(p));
    return out;
}

SubsystemLayout SubsystemLayout::restrict_to(const PartySet& set) const {
    std::vector<int> d;
    d.reserve(set.size());
    for (int p : set) d.push_back(dim(p));
    return SubsystemLayout(std::move(d));
}

std::size_t SubsystemLayout::index_of(std::span<const int> digits) const {
    if (digits.size() != dims_.size()) throw InvalidArgument("digit string length mismatch");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (digits[k] < 0 || digits[k] >= dims_[k]) throw InvalidArgument("digit out of range");
        idx = idx * static_cast<std::size_t>(dims_[k]) + static_cast<std::size_t>(digits[k]);
    }
    return idx;
}

std::vector<int> SubsystemLayout::digits_of(std::size_t index) const {
    std::vector<int> digits(dims_.size());
    for (std::size_t k = dims_.size(); k-- > 0;) {
        digits[k] = static_cast<int>(index % static_cast<std::size_t>(dims_[k]));
        index /= static_cast<std::size_t>(dims_[k]);
    }
    return digits;
}

std::size_t SubsystemLayout::stride(int party) const {
    std::size_t s = 1;
    for (int k = parties() - 1; k > party; --k) s *= static_cast<std::size_t>(dims_[static_cast<std::size_t>(k)]);
    return s;
}

PartySet SubsystemLayout::complement(const PartySet& set) const {
    PartySet out;
    for (int p = 0; p < parties(); ++p) {
        if (std::find(set.begin(), set.end(), p) == set.end()) out.push_back(p);
    }
    return out;
}

PartySet SubsystemLayout::validate(PartySet set) const {
    if (set.empty()) throw InvalidArgument("party set must be non-empty");
    std::sort(set.begin(), set.end());
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set[k] < 0 || set[k] >= parties()) {
            throw InvalidArgument("party index out of range: " + std::to_string(set[k]));
        }
        if (k > 0 && set[k] == set[k - 1]) throw InvalidArgument("repeated party index in " + describe(set));
    }
    return set;
}

PartySet SubsystemLayout::validate_proper(PartySet set) const {
    set = validate(std::move(set));
    if (static_cast<int>(set.size()) == parties()) {
        throw InvalidArgument("party set must be a proper subset of the parties");
    }
    return set;
}

// ---------------------------------------------------------------------------
// States

PureState::PureState(SubsystemLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
        throw InvalidArgument("amplitude vector length does not match the layout");
    }
    const double norm2 = amplitudes_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol) {
        throw InvalidArgument("pure state is not normalized (squared norm " + std::to_string(norm2) + ")");
    }
}

PureState normalized_state(SubsystemLayout layout, Vector v) {
    const double norm = v.norm();
    if (norm == 0.0) throw InvalidArgument("cannot normalize the zero vector");
    v /= norm;
    return PureState(std::move(layout), std::move(v));
}

DensityMatrix::DensityMatrix(SubsystemLayout layout, Matrix entries, Trusted)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (entries_.rows() != n || entries_.cols() != n) {
        throw InvalidArgument("density matrix shape does not match the layout");
    }
    if (!is_hermitian(entries_, kHermitianTol)) throw InvalidArgument("density matrix is not Hermitian");
    const Complex tr = entries_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw InvalidArgument("density matrix trace is not 1 (got " + std::to_string(tr.real()) + ")");
    }
}

DensityMatrix::DensityMatrix(SubsystemLayout layout, Matrix entries)
    : DensityMatrix(std::move(layout), std::move(entries), Trusted{}) {
    const auto eig = eigendecompose_hermitian(entries_, kHermitianTol);
    const double lowest = eig.values(eig.values.size() - 1);
    if (lowest < -kPsdTol) {
        throw InvalidArgument("density matrix has a negative eigenvalue " + std::to_string(lowest));
    }
}

DensityMatrix DensityMatrix::from_trusted(SubsystemLayout layout, Matrix entries) {
    return DensityMatrix(std::move(layout), std::move(entries), Trusted{});
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    return from_trusted(psi.layout(), psi.projector());
}

// ---------------------------------------------------------------------------
// PartitionMap

PartitionMap::PartitionMap(std::vector<PartySet> groups, int parties)
    : groups_(std::move(groups)), parties_(parties) {
    if (groups_.empty()) throw InvalidArgument("partition needs at least one group");
    std::vector<int> seen(static_cast<std::size_t>(std::max(parties, 0)), 0);
    for (auto& g : groups_) {
        if (g.empty()) throw InvalidArgument("partition groups must be non-empty");
        std::sort(g.begin(), g.end());
        for (int p : g) {
            if (p < 0 || p >= parties) throw InvalidArgument("partition index out of range");
            if (seen[static_cast<std::size_t>(p)]++) throw InvalidArgument("partition repeats a party");
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) != parties) {
        throw InvalidArgument("partition does not cover every party");
    }
}

PartitionMap PartitionMap::singletons(int parties) {
    std::vector<PartySet> groups;
    for (int p = 0; p < parties; ++p) groups.push_back({p});
    return PartitionMap(std::move(groups), parties);
}

PartySet PartitionMap::flattened() const {
    PartySet out;
    for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
    return out;
}

// ---------------------------------------------------------------------------
// Numerics

double max_abs_entry(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs_entry(m - m.adjoint()) <= tol;
}

EigenDecomposition eigendecompose_hermitian(const Matrix& h, double tol) {
    if (!is_hermitian(h, tol)) throw InvalidArgument("matrix is not Hermitian within tolerance");
    // symmetrize so the solver sees an exactly Hermitian input
    const Matrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
    const auto n = sym.rows();
    EigenDecomposition out{RealVector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = solver.eigenvalues()(n - 1 - k);
        out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    return out;
}

Vector permute_parties(const Vector& v, const SubsystemLayout& layout, const PartySet& order) {
    const auto map = permutation_map(layout, order);
    Vector out(v.size());
    for (std::size_t k = 0; k < map.size(); ++k) out(static_cast<Eigen::Index>(map[k])) = v(static_cast<Eigen::Index>(k));
    return out;
}

Matrix permute_parties(const Matrix& m, const SubsystemLayout& layout, const PartySet& order) {
    const auto map = permutation_map(layout, order);
    const auto n = static_cast<Eigen::Index>(map.size());
    Matrix out(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto nc = static_cast<Eigen::Index>(map[static_cast<std::size_t>(c)]);
        for (Eigen::Index r = 0; r < n; ++r) {
            out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(r)]), nc) = m(r, c);
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, PartySet keep) {
    const auto& layout = rho.layout();
    keep = layout.validate(std::move(keep));
    if (static_cast<int>(keep.size()) == layout.parties()) return rho;
    const PartySet rest = layout.complement(keep);
    const Matrix perm = permute_parties(rho.entries(), layout, concat(keep, rest));
    const auto dk = static_cast<Eigen::Index>(layout.dim_of(keep));
    const auto dt = static_cast<Eigen::Index>(layout.dim_of(rest));
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index b = 0; b < dk; ++b) {
        for (Eigen::Index a = 0; a < dk; ++a) {
            Complex acc = 0.0;
            for (Eigen::Index t = 0; t < dt; ++t) acc += perm(a * dt + t, b * dt + t);
            out(a, b) = acc;
        }
    }
    return DensityMatrix::from_trusted(layout.restrict_to(keep), std::move(out));
}

namespace {

// Rows: kept digits; columns: traced digits.
Matrix reshape_for_cut(const PureState& psi, const PartySet& keep) {
    const auto& layout = psi.layout();
    const PartySet rest = layout.complement(keep);
    const Vector perm = rest.empty() ? psi.amplitudes() : permute_parties(psi.amplitudes(), layout, concat(keep, rest));
    const auto dk = static_cast<Eigen::Index>(layout.dim_of(keep));
    const auto dt = static_cast<Eigen::Index>(layout.dim_of(rest));
    Matrix out(dk, dt);
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index t = 0; t < dt; ++t) out(a, t) = perm(a * dt + t);
    }
    return out;
}

}  // namespace

DensityMatrix marginal(const PureState& psi, PartySet keep) {
    keep = psi.layout().validate(std::move(keep));
    const Matrix m = reshape_for_cut(psi, keep);
    Matrix rho = m * m.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix::from_trusted(psi.layout().restrict_to(keep), std::move(rho));
}

Matrix partial_transpose(const Matrix& m, const SubsystemLayout& layout, PartySet subset) {
    subset = layout.validate_proper(std::move(subset));
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    if (m.rows() != n || m.cols() != n) throw InvalidArgument("matrix shape does not match the layout");
    // contribution of the transposed parties to each basis index
    std::vector<std::size_t> part(static_cast<std::size_t>(n), 0);
    for (std::size_t idx = 0; idx < part.size(); ++idx) {
        const auto digits = layout.digits_of(idx);
        std::size_t s = 0;
        for (int p : subset) s += static_cast<std::size_t>(digits[static_cast<std::size_t>(p)]) * layout.stride(p);
        part[idx] = s;
    }
    Matrix out(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto pc = part[static_cast<std::size_t>(c)];
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto pr = part[static_cast<std::size_t>(r)];
            const auto nr = static_cast<Eigen::Index>(static_cast<std::size_t>(r) - pr + pc);
            const auto nc = static_cast<Eigen::Index>(static_cast<std::size_t>(c) - pc + pr);
            out(nr, nc) = m(r, c);
        }
    }
    return out;
}

Matrix partial_transpose(const DensityMatrix& rho, PartySet subset) {
    return partial_transpose(rho.entries(), rho.layout(), std::move(subset));
}

double trace_norm(const Matrix& h) {
    const auto eig = eigendecompose_hermitian(h, kPsdTol);
    return eig.values.cwiseAbs().sum();
}

RealVector schmidt_coefficients(const PureState& psi, PartySet cut) {
    cut = psi.layout().validate_proper(std::move(cut));
    const Matrix m = reshape_for_cut(psi, cut);
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
}

PureState merge_parties(const PureState& psi, const PartitionMap& pmap) {
    const auto& layout = psi.layout();
    if (pmap.parties() != layout.parties()) throw InvalidArgument("partition does not match the layout");
    std::vector<int> dims;
    for (const auto& g : pmap.groups()) dims.push_back(static_cast<int>(layout.dim_of(g)));
    Vector v = permute_parties(psi.amplitudes(), layout, pmap.flattened());
    return PureState(SubsystemLayout(std::move(dims)), std::move(v));
}

DensityMatrix merge_parties(const DensityMatrix& rho, const PartitionMap& pmap) {
    const auto& layout = rho.layout();
    if (pmap.parties() != layout.parties()) throw InvalidArgument("partition does not match the layout");
    std::vector<int> dims;
    for (const auto& g : pmap.groups()) dims.push_back(static_cast<int>(layout.dim_of(g)));
    Matrix m = permute_parties(rho.entries(), layout, pmap.flattened());
    return DensityMatrix::from_trusted(SubsystemLayout(std::move(dims)), std::move(m));
}

PureState embed_local_dims(const PureState& psi, const std::vector<int>& dims) {
    const auto& layout = psi.layout();
    if (static_cast<int>(dims.size()) != layout.parties()) throw InvalidArgument("embedding needs one dimension per party");
    for (int p = 0; p < layout.parties(); ++p) {
        if (dims[static_cast<std::size_t>(p)] < layout.dim(p)) throw InvalidArgument("embedding cannot shrink a party");
    }
    SubsystemLayout target(dims);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(target.total_dim()));
    for (std::size_t idx = 0; idx < layout.total_dim(); ++idx) {
        const auto digits = layout.digits_of(idx);
        out(static_cast<Eigen::Index>(target.index_of(digits))) = psi.amplitudes()(static_cast<Eigen::Index>(idx));
    }
    return PureState(std::move(target), std::move(out));
}

}  // namespace pcsmono
