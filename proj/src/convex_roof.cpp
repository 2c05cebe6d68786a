#include "pcsmono/convex_roof.hpp"

#include "pcsmono/nelder_mead.hpp"
#include "pcsmono/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace pcsmono {

MeasureViolation::MeasureViolation(double value)
    : std::runtime_error("pure-state measure is negative beyond roundoff: " + std::to_string(value)),
      value_(value) {}

double Decomposition::total_weight() const {
    double w = 0.0;
    for (const auto& m : members) w += m.weight;
    return w;
}

Matrix Decomposition::reconstruct() const {
    if (members.empty()) return Matrix();
    const auto n = members.front().state.amplitudes().size();
    Matrix out = Matrix::Zero(n, n);
    for (const auto& m : members) out += m.weight * m.state.projector();
    return out;
}

Decomposition eigen_ensemble(const DensityMatrix& rho) {
    const auto eig = eigendecompose_hermitian(rho.entries(), kHermitianTol);
    Decomposition dec;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        const double q = eig.values(k);
        if (q <= kRankFloor) break;
        dec.members.push_back({q, normalized_state(rho.layout(), eig.vectors.col(k))});
    }
    return dec;
}

Decomposition hjw_decomposition(const Decomposition& eigen, const Matrix& u) {
    const auto r = u.rows();
    const auto k = static_cast<Eigen::Index>(eigen.size());
    if (u.cols() != r) throw InvalidArgument("mixing matrix must be square");
    if (r < k) throw InvalidArgument("ensemble size is below the rank of the density matrix");
    if (max_abs_entry(u.adjoint() * u - Matrix::Identity(r, r)) > 1e-10) {
        throw InvalidArgument("mixing matrix is not unitary");
    }
    if (k == 0) return {};
    const auto& layout = eigen.members.front().state.layout();
    const auto dim = eigen.members.front().state.amplitudes().size();

    // columns: sqrt(q_l)|e_l>
    Matrix scaled(dim, k);
    for (Eigen::Index l = 0; l < k; ++l) {
        const auto& m = eigen.members[static_cast<std::size_t>(l)];
        scaled.col(l) = std::sqrt(m.weight) * m.state.amplitudes();
    }
    const Matrix mixed = scaled * u.leftCols(k).transpose();

    Decomposition dec;
    for (Eigen::Index h = 0; h < r; ++h) {
        const double w = mixed.col(h).squaredNorm();
        if (w < kMemberWeightFloor) continue;
        dec.members.push_back({w, PureState(layout, mixed.col(h) / std::sqrt(w))});
    }
    return dec;
}

Decomposition hjw_decomposition(const DensityMatrix& rho, const Matrix& u) {
    return hjw_decomposition(eigen_ensemble(rho), u);
}

Matrix unitary_from_parameters(std::span<const double> params, int r) {
    if (r < 1 || params.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(r)) {
        throw InvalidArgument("unitary parameterization needs r^2 parameters");
    }
    Matrix h = Matrix::Zero(r, r);
    std::size_t idx = 0;
    for (int k = 0; k < r; ++k) h(k, k) = params[idx++];
    for (int k = 0; k < r; ++k) {
        for (int l = k + 1; l < r; ++l) {
            const Complex z(params[idx], params[idx + 1]);
            idx += 2;
            h(k, l) = z;
            h(l, k) = std::conj(z);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    const auto& v = solver.eigenvectors();
    Vector phases(r);
    for (int k = 0; k < r; ++k) phases(k) = std::polar(1.0, solver.eigenvalues()(k));
    return v * phases.asDiagonal() * v.adjoint();
}

Matrix random_unitary(int r, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(r, r);
    for (int c = 0; c < r; ++c) {
        for (int k = 0; k < r; ++k) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(k, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < r; ++k) {
        const Complex d = rr(k, k);
        if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

double roof_objective(const Decomposition& dec, const PureMeasure& measure) {
    double acc = 0.0;
    for (const auto& m : dec.members) {
        if (m.weight < kMemberWeightFloor) continue;
        const double v = measure(m.state);
        if (!(v >= kViolationFloor)) throw MeasureViolation(v);
        acc += m.weight * std::sqrt(std::max(v, 0.0));
    }
    return acc;
}

namespace {

struct StartTask {
    int size;
    int start;
};

struct StartOutcome {
    std::vector<double> params;
    double objective = 0.0;
    int evaluations = 0;
    bool converged = false;
};

StartOutcome run_start(const Decomposition& eigen, const PureMeasure& measure, const RoofOptions& opts,
                       const StartTask& task) {
    const int r = task.size;
    const std::size_t count = static_cast<std::size_t>(r) * static_cast<std::size_t>(r);
    std::vector<double> x0(count, 0.0);
    if (task.start > 0) {
        // start 0 is the eigen-ensemble itself
        std::mt19937_64 rng(derive_seed(opts.seed, {r, task.start}));
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        for (auto& x : x0) x = angle(rng);
    }
    const Objective f = [&](std::span<const double> params) {
        return roof_objective(hjw_decomposition(eigen, unitary_from_parameters(params, r)), measure);
    };
    SimplexOptions sopts;
    sopts.ftol = opts.tol;
    sopts.max_evaluations = opts.max_iter;
    sopts.restarts = opts.restarts;
    auto res = minimize_simplex(f, std::move(x0), sopts);
    return StartOutcome{std::move(res.x), res.f, res.evaluations, res.converged};
}

std::vector<StartOutcome> run_all(const Decomposition& eigen, const PureMeasure& measure, const RoofOptions& opts,
                                  const std::vector<StartTask>& tasks) {
    std::vector<StartOutcome> out(tasks.size());
    const int workers = std::clamp(opts.threads, 1, static_cast<int>(tasks.size()));
    if (workers == 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) out[t] = run_start(eigen, measure, opts, tasks[t]);
        return out;
    }
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            try {
                out[t] = run_start(eigen, measure, opts, tasks[t]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace

RoofResult minimize_roof(const DensityMatrix& rho, const PureMeasure& measure, const RoofOptions& opts) {
    if (opts.starts < 1) throw InvalidArgument("at least one optimizer start is required");
    if (!(opts.tol > 0.0)) throw InvalidArgument("optimizer tolerance must be positive");
    const Decomposition eigen = eigen_ensemble(rho);
    const int rank = static_cast<int>(eigen.size());
    if (rank == 0) throw InvalidArgument("density matrix has no support above the rank floor");

    RoofResult result;
    if (rank == 1) {
        result.objective = roof_objective(eigen, measure);
        result.value = result.objective * result.objective;
        result.best = eigen;
        result.evaluations = 1;
        result.best_size = 1;
        result.by_size = {{1, result.objective}};
        return result;
    }

    std::vector<int> sizes;
    if (opts.size) {
        if (*opts.size < rank) throw InvalidArgument("ensemble size is below the rank of the density matrix");
        sizes.push_back(*opts.size);
    } else {
        for (int off : opts.size_offsets) {
            if (off < 0) throw InvalidArgument("ensemble size offsets must be nonnegative");
            sizes.push_back(rank + off);
        }
        if (sizes.empty()) sizes.push_back(rank);
    }

    std::vector<StartTask> tasks;
    for (int r : sizes) {
        for (int s = 0; s < opts.starts; ++s) tasks.push_back({r, s});
    }
    const auto outcomes = run_all(eigen, measure, opts, tasks);

    std::size_t best = 0;
    double lo = outcomes.front().objective;
    double hi = lo;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        const auto& o = outcomes[t];
        result.evaluations += o.evaluations;
        result.converged_starts += o.converged ? 1 : 0;
        lo = std::min(lo, o.objective);
        hi = std::max(hi, o.objective);
        if (o.objective < outcomes[best].objective) best = t;
    }
    for (int r : sizes) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            if (tasks[t].size == r) v = std::min(v, outcomes[t].objective);
        }
        result.by_size.emplace_back(r, v);
    }
    result.starts = static_cast<int>(tasks.size());
    result.spread = hi - lo;
    result.objective = outcomes[best].objective;
    result.value = result.objective * result.objective;
    result.best_size = tasks[best].size;
    result.best = hjw_decomposition(eigen, unitary_from_parameters(outcomes[best].params, tasks[best].size));
    return result;
}

RoofResult roof_scren(const DensityMatrix& rho, PartySet cut, const RoofOptions& opts) {
    cut = rho.layout().validate_proper(std::move(cut));
    const PureMeasure measure = [cut](const PureState& psi) { return scren_pure_value(psi, cut); };
    return minimize_roof(rho, measure, opts);
}

MeasureValue scren_mixed(const DensityMatrix& rho, PartySet cut, const RoofOptions& opts) {
    const auto res = roof_scren(rho, std::move(cut), opts);
    std::ostringstream detail;
    detail << "starts=" << res.starts << " converged=" << res.converged_starts << " spread=" << res.spread
           << " evaluations=" << res.evaluations << " size=" << res.best_size;
    auto out = MeasureValue::nonnegative(res.value, Method::optimizer, detail.str());
    out.converged = res.converged_starts > 0 || res.starts == 0;
    return out;
}

}  // namespace pcsmono
