#include "pcsmono/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pcsmono {

namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t out = 1;
    for (int k = 0; k < exp; ++k) out *= base;
    return out;
}

// Basis index of |0..j..0> with level j on `party`.
std::size_t excitation_index(const SubsystemLayout& layout, int party, int level) {
    return static_cast<std::size_t>(level) * layout.stride(party);
}

}  // namespace

// ---------------------------------------------------------------------------
// WClassCoefficients

WClassCoefficients::WClassCoefficients(Matrix a, int d) : a_(std::move(a)), d_(d) {
    if (d_ < 2) throw InvalidArgument("W-class local dimension must be >= 2");
    if (a_.rows() < 1) throw InvalidArgument("W-class state needs at least one party");
    if (a_.cols() != d_ - 1) throw InvalidArgument("W-class coefficient matrix needs d-1 columns");
    const double norm2 = a_.squaredNorm();
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kNormTol) {
        throw InvalidArgument("W-class coefficients violate the normalization sum |a_ij|^2 = 1 (got " +
                              std::to_string(norm2) + ")");
    }
}

double WClassCoefficients::weight(int party) const {
    return a_.row(party).squaredNorm();
}

double WClassCoefficients::weight(const PartySet& parties) const {
    double w = 0.0;
    for (int p : parties) w += weight(p);
    return w;
}

SubsystemLayout WClassCoefficients::layout() const {
    return SubsystemLayout(std::vector<int>(static_cast<std::size_t>(n()), d_));
}

WClassCoefficients WClassCoefficients::standard(int n, int d) {
    if (n < 1) throw InvalidArgument("standard W state needs n >= 1");
    if (d < 2) throw InvalidArgument("standard W state needs d >= 2");
    Matrix a = Matrix::Zero(n, d - 1);
    a.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    return WClassCoefficients(std::move(a), d);
}

void validate(const PCSParams& params) {
    if (!(params.p >= 0.0 && params.p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
}

// ---------------------------------------------------------------------------
// Constructors

PureState build_w_state(const WClassCoefficients& coeffs) {
    const auto layout = coeffs.layout();
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    for (int i = 0; i < coeffs.n(); ++i) {
        for (int j = 1; j < coeffs.d(); ++j) {
            v(static_cast<Eigen::Index>(excitation_index(layout, i, j))) = coeffs.a()(i, j - 1);
        }
    }
    return PureState(layout, std::move(v));
}

PureState build_vacuum(const SubsystemLayout& layout) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    v(0) = 1.0;
    return PureState(layout, std::move(v));
}

PureState build_coherent_superposition(const WClassCoefficients& coeffs, double p) {
    validate(PCSParams{p, 0.0});
    const PureState w = build_w_state(coeffs);
    Vector v = std::sqrt(p) * w.amplitudes();
    v(0) = std::sqrt(1.0 - p);
    return PureState(w.layout(), std::move(v));
}

DensityMatrix build_pcs(const PCSState& pcs) {
    validate(pcs.params);
    const double p = pcs.params.p;
    const PureState w = build_w_state(pcs.coeffs);
    const Vector& wv = w.amplitudes();
    const auto n = wv.size();
    Vector vac = Vector::Zero(n);
    vac(0) = 1.0;
    const double coherence = pcs.params.lambda * std::sqrt(p * (1.0 - p));
    Matrix rho = p * (wv * wv.adjoint());
    rho(0, 0) += 1.0 - p;
    rho += coherence * (wv * vac.adjoint() + vac * wv.adjoint());
    // rank <= 2 and PSD for p, lambda in [0, 1]
    return DensityMatrix::from_trusted(w.layout(), std::move(rho));
}

DensityMatrix phase_damp(const PureState& psi, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
    const Vector& v = psi.amplitudes();
    // (I - P0) psi and P0 psi
    Vector excited = v;
    excited(0) = 0.0;
    Vector vacuum = Vector::Zero(v.size());
    vacuum(0) = v(0);
    Matrix rho = lambda * (v * v.adjoint());
    rho += (1.0 - lambda) * (excited * excited.adjoint() + vacuum * vacuum.adjoint());
    return DensityMatrix::from_trusted(psi.layout(), std::move(rho));
}

// ---------------------------------------------------------------------------
// Reduction

PCSState restrict_pcs(const PCSState& pcs, PartySet keep) {
    validate(pcs.params);
    const auto layout = pcs.coeffs.layout();
    keep = layout.validate(std::move(keep));
    if (static_cast<int>(keep.size()) == layout.parties()) return pcs;

    // retained W weight, clamped so that p' <= p holds in floating point
    const double omega = std::min(pcs.coeffs.weight(keep), 1.0);
    if (omega == 0.0) {
        throw DegenerateReduction("kept parties carry no W-class weight; the reduced W-class state is undefined");
    }
    Matrix a(static_cast<Eigen::Index>(keep.size()), pcs.coeffs.d() - 1);
    for (std::size_t k = 0; k < keep.size(); ++k) a.row(static_cast<Eigen::Index>(k)) = pcs.coeffs.a().row(keep[k]);
    a /= std::sqrt(omega);

    const double p = pcs.params.p;
    const double p_new = p * omega;
    const double lambda_new = p >= 1.0 ? 0.0 : pcs.params.lambda * std::sqrt((1.0 - p) / (1.0 - p_new));
    return PCSState{WClassCoefficients(std::move(a), pcs.coeffs.d()), PCSParams{p_new, lambda_new}};
}

PCSState reduce_pcs_symbolic(const PCSState& pcs, PartySet traced) {
    const auto layout = pcs.coeffs.layout();
    traced = layout.validate_proper(std::move(traced));
    return restrict_pcs(pcs, layout.complement(traced));
}

// ---------------------------------------------------------------------------
// Merging

WClassCoefficients merge_wclass_coeffs(const WClassCoefficients& coeffs, const PartitionMap& pmap) {
    if (pmap.parties() != coeffs.n()) throw InvalidArgument("partition does not match the W-class party count");
    const int d = coeffs.d();
    std::size_t largest = 0;
    for (const auto& g : pmap.groups()) largest = std::max(largest, g.size());
    const auto d_max = ipow(static_cast<std::size_t>(d), static_cast<int>(largest));
    const auto m = static_cast<Eigen::Index>(pmap.groups().size());

    Matrix b = Matrix::Zero(m, static_cast<Eigen::Index>(d_max - 1));
    for (Eigen::Index s = 0; s < m; ++s) {
        const auto& group = pmap.groups()[static_cast<std::size_t>(s)];
        const int size = static_cast<int>(group.size());
        for (int t = 0; t < size; ++t) {
            // later parties in a group are the less significant digits
            const auto place = ipow(static_cast<std::size_t>(d), size - 1 - t);
            for (int j = 1; j < d; ++j) {
                b(s, static_cast<Eigen::Index>(static_cast<std::size_t>(j) * place - 1)) =
                    coeffs.a()(group[static_cast<std::size_t>(t)], j - 1);
            }
        }
    }
    return WClassCoefficients(std::move(b), static_cast<int>(d_max));
}

WClassCoefficients sample_random_wclass(int n, int d, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("random W-class state needs n >= 2");
    if (d < 2) throw InvalidArgument("random W-class state needs d >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix a(n, d - 1);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            a(i, j) = Complex(re, im);
        }
    }
    a /= a.norm();
    return WClassCoefficients(std::move(a), d);
}

// ---------------------------------------------------------------------------
// Phase handling

Matrix canonical_phase(const Matrix& m) {
    double best = -1.0;
    Complex pivot = 1.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (std::abs(m(r, c)) > best) {
                best = std::abs(m(r, c));
                pivot = m(r, c);
            }
        }
    }
    if (best <= 0.0) return m;
    return m * (std::conj(pivot) / std::abs(pivot));
}

double phase_insensitive_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    const Complex overlap = (a.array().conjugate() * b.array()).sum();
    const Complex phase = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : Complex(1.0);
    return max_abs_entry(a - b * phase);
}

// ---------------------------------------------------------------------------
// Recognition

std::optional<PCSState> recognize_pcs(const DensityMatrix& rho, double tol) {
    const auto& layout = rho.layout();
    const int d = layout.dim(0);
    for (int p = 1; p < layout.parties(); ++p) {
        if (layout.dim(p) != d) return std::nullopt;
    }
    const Matrix& m = rho.entries();
    const int n = layout.parties();

    // single-excitation support, ordered party-major then level
    std::vector<Eigen::Index> support;
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < d; ++j) support.push_back(static_cast<Eigen::Index>(excitation_index(layout, i, j)));
    }
    std::vector<char> allowed(layout.total_dim(), 0);
    allowed[0] = 1;
    for (auto s : support) allowed[static_cast<std::size_t>(s)] = 1;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if ((!allowed[static_cast<std::size_t>(r)] || !allowed[static_cast<std::size_t>(c)]) && std::abs(m(r, c)) > tol) {
                return std::nullopt;
            }
        }
    }

    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix block(k, k);
    Vector cross(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        cross(a) = m(support[static_cast<std::size_t>(a)], 0);
        for (Eigen::Index b = 0; b < k; ++b) block(a, b) = m(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
    }

    const double p = std::clamp(block.trace().real(), 0.0, 1.0);
    Vector w(k);
    double lambda = 0.0;
    if (p <= tol) {
        // vacuum: any coefficients represent it
        w.setZero();
        w(0) = 1.0;
    } else {
        const auto eig = eigendecompose_hermitian(block, kPsdTol);
        w = eig.vectors.col(0);
        const Complex z = w.dot(cross);  // <W|cross>
        if (std::abs(z) > 0.0) w *= z / std::abs(z);
        if (p < 1.0) lambda = std::clamp(std::abs(z) / std::sqrt(p * (1.0 - p)), 0.0, 1.0);
    }
    Matrix a(n, d - 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < d; ++j) a(i, j - 1) = w(static_cast<Eigen::Index>(i * (d - 1) + (j - 1)));
    }
    a /= a.norm();
    PCSState candidate{WClassCoefficients(std::move(a), d), PCSParams{p, lambda}};
    if (max_abs_entry(build_pcs(candidate).entries() - m) > tol) return std::nullopt;
    return candidate;
}

}  // namespace pcsmono
