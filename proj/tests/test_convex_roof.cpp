#include <doctest.h>

#include "oracle.hpp"
#include "pcsmono/convex_roof.hpp"
#include "pcsmono/nelder_mead.hpp"

#include <random>

using namespace pcsmono;

namespace {

const PCSState kFixture{WClassCoefficients::standard(3, 2), {0.5, 0.7}};

PureMeasure scren_on(PartySet cut) {
    return [cut](const PureState& psi) { return scren_pure_value(psi, cut); };
}

double max_unitarity_error(const Matrix& u) {
    return oracle::max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

PCSState random_pcs(int n, int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p = u(rng);
    return PCSState{WClassCoefficients(oracle::random_coefficients(n, d, rng), d), PCSParams{p, u(rng)}};
}

}  // namespace

TEST_CASE("simplex minimizer") {
    const Objective rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    SimplexOptions opts;
    opts.ftol = 1e-14;
    opts.max_evaluations = 5000;
    const auto res = minimize_simplex(rosen, {-1.2, 1.0}, opts);
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res.evaluations <= 5000 + 10);

    const Objective flat = [](std::span<const double>) { return 3.0; };
    const auto f = minimize_simplex(flat, {0.0, 0.0, 0.0}, SimplexOptions{});
    CHECK(f.converged);
    CHECK(f.f == 3.0);
}

TEST_CASE("unitary parameterization") {
    std::vector<double> zero(9, 0.0);
    CHECK(oracle::max_abs(unitary_from_parameters(zero, 3) - Matrix::Identity(3, 3)) < 1e-15);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int r = 1; r <= 4; ++r) {
        std::vector<double> params(static_cast<std::size_t>(r * r));
        for (auto& x : params) x = 3.0 * g(rng);
        CHECK(max_unitarity_error(unitary_from_parameters(params, r)) < 1e-12);
        CHECK(max_unitarity_error(random_unitary(r, rng)) < 1e-12);
    }
    CHECK_THROWS_AS(unitary_from_parameters(zero, 2), InvalidArgument);
}

TEST_CASE("eigen ensemble") {
    const PureState w = build_w_state(WClassCoefficients::standard(3, 2));
    const auto pure = eigen_ensemble(DensityMatrix::from_pure(w));
    REQUIRE(pure.size() == 1);
    CHECK(pure.members[0].weight == doctest::Approx(1.0));

    const auto mixed = eigen_ensemble(DensityMatrix(SubsystemLayout({2}), Matrix::Identity(2, 2) / 2.0));
    REQUIRE(mixed.size() == 2);
    CHECK(mixed.members[0].weight == doctest::Approx(0.5));
    CHECK(mixed.members[1].weight == doctest::Approx(0.5));

    const auto rho = build_pcs(kFixture);
    const auto pcs = eigen_ensemble(rho);
    CHECK(pcs.size() == 2);
    CHECK(std::abs(pcs.total_weight() - 1.0) < 1e-10);
    CHECK(oracle::max_abs(pcs.reconstruct() - rho.entries()) < 1e-10);
}

TEST_CASE("HJW decompositions") {
    const auto rho = build_pcs(kFixture);
    const auto eigen = eigen_ensemble(rho);

    SUBCASE("identity unitary reproduces the eigen ensemble") {
        const auto dec = hjw_decomposition(rho, Matrix::Identity(4, 4));
        REQUIRE(dec.size() == 2);
        for (std::size_t h = 0; h < 2; ++h) {
            CHECK(dec.members[h].weight == doctest::Approx(eigen.members[h].weight));
            CHECK(std::abs(std::abs(dec.members[h].state.amplitudes().dot(eigen.members[h].state.amplitudes())) - 1.0) < 1e-12);
        }
    }
    SUBCASE("reconstruction over a dense 2x2 grid and random larger unitaries") {
        for (int a = 0; a < 12; ++a) {
            for (int b = 0; b < 12; ++b) {
                const double theta = a * M_PI / 12.0;
                const double phi = b * 2.0 * M_PI / 12.0;
                Matrix u(2, 2);
                u << std::cos(theta), -std::sin(theta) * std::polar(1.0, -phi), std::sin(theta) * std::polar(1.0, phi),
                    std::cos(theta);
                const auto dec = hjw_decomposition(rho, u);
                CHECK(oracle::max_abs(dec.reconstruct() - rho.entries()) <= 1e-10);
            }
        }
        std::mt19937_64 rng(2);
        for (int r = 2; r <= 4; ++r) {
            for (int trial = 0; trial < 20; ++trial) {
                const auto dec = hjw_decomposition(rho, random_unitary(r, rng));
                CHECK(oracle::max_abs(dec.reconstruct() - rho.entries()) <= 1e-10);
                CHECK(std::abs(dec.total_weight() - 1.0) <= 1e-10);
            }
        }
    }
    SUBCASE("rotated members stay inside span{W, vacuum}") {
        const Vector wk = oracle::w_ket(kFixture.coeffs.a(), 2);
        const Vector zk = oracle::vacuum_ket(3, 2);
        Matrix u(2, 2);
        const double t = 0.37;
        u << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        for (const auto& m : hjw_decomposition(rho, u).members) {
            const Vector v = m.state.amplitudes();
            CHECK((v - wk * wk.dot(v) - zk * zk.dot(v)).norm() <= 1e-10);
        }
    }
    SUBCASE("invalid unitaries") {
        CHECK_THROWS_AS(hjw_decomposition(rho, Matrix::Identity(1, 1)), InvalidArgument);
        CHECK_THROWS_AS(hjw_decomposition(rho, 2.0 * Matrix::Identity(2, 2)), InvalidArgument);
    }
}

TEST_CASE("member SCREN carries the W-component unitary entry") {
    // Incoherent mixture p|W><W| + (1-p)|0><0| with the ensemble {sqrt(p) W, sqrt(1-p) 0}.
    // Member h is u_h1 sqrt(p) W + u_h2 sqrt(1-p) |0>, and its weighted root SCREN equals
    // 2 p |u_h1|^2 sqrt(X(1-X)). The alternative with |u_h2| fails member by member while
    // both agree after summing over h.
    const double p = 0.6;
    const auto coeffs = WClassCoefficients::standard(3, 2);
    const Decomposition base{{{p, build_w_state(coeffs)}, {1.0 - p, build_vacuum(coeffs.layout())}}};
    const double x = coeffs.weight(0);
    const auto measure = scren_on({0});
    std::mt19937_64 rng(3);
    double max_h1 = 0.0, max_h2 = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix u = random_unitary(2, rng);
        const auto dec = hjw_decomposition(base, u);
        REQUIRE(dec.size() == 2);
        double total = 0.0;
        for (int h = 0; h < 2; ++h) {
            const auto& m = dec.members[static_cast<std::size_t>(h)];
            const double value = m.weight * std::sqrt(measure(m.state));
            total += value;
            max_h1 = std::max(max_h1, std::abs(value - 2.0 * p * std::norm(u(h, 0)) * std::sqrt(x * (1.0 - x))));
            max_h2 = std::max(max_h2, std::abs(value - 2.0 * p * std::norm(u(h, 1)) * std::sqrt(x * (1.0 - x))));
        }
        CHECK(total == doctest::Approx(2.0 * p * std::sqrt(x * (1.0 - x))).epsilon(1e-12));
    }
    CHECK(max_h1 < 1e-12);
    CHECK(max_h2 > 1e-3);
}

TEST_CASE("roof objective") {
    std::mt19937_64 rng(4);
    const PureState prod1(SubsystemLayout({2, 2}), oracle::kron(oracle::random_ket(2, rng), oracle::random_ket(2, rng)));
    const PureState prod2(SubsystemLayout({2, 2}), oracle::kron(oracle::random_ket(2, rng), oracle::random_ket(2, rng)));
    CHECK(roof_objective(Decomposition{{{0.3, prod1}, {0.7, prod2}}}, scren_on({0})) == doctest::Approx(0.0).epsilon(1e-12));

    const auto w = build_w_state(WClassCoefficients::standard(3, 2));
    CHECK(roof_objective(Decomposition{{{1.0, w}}}, scren_on({0})) == doctest::Approx(std::sqrt(8.0 / 9.0)));

    SUBCASE("decomposition independence on the fixture") {
        const auto eigen = eigen_ensemble(build_pcs(kFixture));
        double lo = 1e9, hi = -1e9;
        for (int trial = 0; trial < 200; ++trial) {
            const int r = 2 + trial % 3;
            const double v = roof_objective(hjw_decomposition(eigen, random_unitary(r, rng)), scren_on({0}));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi - lo <= 1e-9);
        CHECK(std::abs(lo - std::sqrt(2.0) / 3.0) <= 1e-10);
    }
    SUBCASE("violation policy") {
        const Decomposition dec{{{1.0, w}}};
        CHECK(roof_objective(dec, [](const PureState&) { return -5e-7; }) == 0.0);
        CHECK_THROWS_AS(roof_objective(dec, [](const PureState&) { return -2e-6; }), MeasureViolation);
    }
}

TEST_CASE("convex roof minimization") {
    RoofOptions opts;
    opts.seed = 11;

    SUBCASE("pure projector needs no search") {
        const auto psi = build_coherent_superposition(kFixture.coeffs, 0.5);
        const auto res = minimize_roof(DensityMatrix::from_pure(psi), scren_on({0}), opts);
        CHECK(res.value == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
        CHECK(res.evaluations <= 1);
        CHECK(res.converged());
    }
    SUBCASE("separable diagonal mixture has zero roof") {
        Matrix diag = Matrix::Zero(4, 4);
        diag(0, 0) = 0.4;
        diag(3, 3) = 0.6;
        const auto v = scren_mixed(DensityMatrix(SubsystemLayout({2, 2}), diag), {0}, opts);
        CHECK(v.value <= 1e-9);
        CHECK(v.method == Method::optimizer);
    }
    SUBCASE("vacuum projector") {
        const auto vac = build_vacuum(SubsystemLayout({2, 2, 2}));
        CHECK(scren_mixed(DensityMatrix::from_pure(vac), {0}, opts).value == 0.0);
    }
    SUBCASE("fixture one-vs-rest matches the closed form") {
        const auto res = roof_scren(build_pcs(kFixture), {0}, opts);
        CHECK(std::abs(res.value - 2.0 / 9.0) <= 1e-4);
        CHECK(res.spread <= opts.tol);
        CHECK(res.converged());
    }
    SUBCASE("two-party marginal of the three-qubit W state") {
        const auto w = build_w_state(WClassCoefficients::standard(3, 2));
        const auto rho12 = marginal(w, {0, 1});
        const auto res = roof_scren(rho12, {0}, opts);
        CHECK(std::abs(res.value - 4.0 / 9.0) <= 1e-4);
        CHECK(oracle::max_abs(res.best.reconstruct() - rho12.entries()) <= 1e-10);
    }
    SUBCASE("two-qubit mixtures match the squared Wootters concurrence") {
        // Eigenvectors are entangled while the roof is small, so the search has real work to do.
        std::mt19937_64 rng(6);
        for (int trial = 0; trial < 6; ++trial) {
            const Vector a = oracle::random_ket(4, rng);
            const Vector b = oracle::random_ket(4, rng);
            const double w = 0.3 + 0.1 * trial;
            Matrix m = w * a * a.adjoint() + (1.0 - w) * b * b.adjoint();
            m = (0.5 * (m + m.adjoint())).eval();
            const DensityMatrix rho(SubsystemLayout({2, 2}), m);
            const double c = oracle::concurrence(m);
            RoofOptions local = opts;
            local.seed = static_cast<std::uint64_t>(100 + trial);
            const auto res = roof_scren(rho, {0}, local);
            CHECK(std::abs(res.value - c * c) <= 1e-4);
            CHECK(res.value >= c * c - 1e-9);
            const double eigen_obj = roof_objective(eigen_ensemble(rho), scren_on({0}));
            CHECK(res.objective <= eigen_obj + 1e-12);
            for (std::size_t k = 1; k < res.by_size.size(); ++k) {
                CHECK(res.by_size[k].second <= res.by_size[k - 1].second + local.tol);
            }
        }
        Vector phi_p = Vector::Zero(4), phi_m = Vector::Zero(4);
        phi_p(0) = phi_p(3) = phi_m(0) = 1.0 / std::sqrt(2.0);
        phi_m(3) = -1.0 / std::sqrt(2.0);
        const Matrix bell_mix = 0.6 * phi_p * phi_p.adjoint() + 0.4 * phi_m * phi_m.adjoint();
        const auto res = roof_scren(DensityMatrix(SubsystemLayout({2, 2}), bell_mix), {0}, opts);
        CHECK(std::abs(res.value - 0.04) <= 1e-4);
    }
    SUBCASE("uniform four-party W, pair marginal") {
        const PCSState pcs{WClassCoefficients::standard(4, 2), {1.0, 0.3}};
        const auto v = scren_mixed(partial_trace(build_pcs(pcs), {1, 3}), {0}, opts);
        CHECK(std::abs(v.value - 0.25) <= 1e-4);
    }
    SUBCASE("pair closed form against the optimizer on random PCS marginals") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 3 + trial % 2;
            const auto pcs = random_pcs(n, 2 + trial % 2, rng);
            const int i = trial % n;
            const int j = (trial + 1) % n;
            const PartySet keep{std::min(i, j), std::max(i, j)};
            RoofOptions local = opts;
            local.seed = static_cast<std::uint64_t>(trial);
            const auto v = scren_mixed(partial_trace(build_pcs(pcs), keep), {i < j ? 0 : 1}, local);
            const double closed = scren_pcs_pair(pcs, i, j).value;
            CHECK(std::abs(v.value - closed) <= 1e-4);
            CHECK(v.value >= closed - 1e-9);
        }
    }
    SUBCASE("seeded runs are bit-identical, with or without threads") {
        const auto w = build_w_state(WClassCoefficients::standard(3, 2));
        const auto rho12 = marginal(w, {0, 1});
        RoofOptions seq = opts;
        seq.size_offsets = {1};
        seq.starts = 4;
        const auto a = roof_scren(rho12, {0}, seq);
        const auto b = roof_scren(rho12, {0}, seq);
        RoofOptions par = seq;
        par.threads = 3;
        const auto c = roof_scren(rho12, {0}, par);
        CHECK(a.value == b.value);
        CHECK(a.value == c.value);
        CHECK(a.evaluations == c.evaluations);
        CHECK(a.spread == c.spread);
    }
    SUBCASE("option validation") {
        RoofOptions bad = opts;
        bad.starts = 0;
        CHECK_THROWS_AS(roof_scren(build_pcs(kFixture), {0}, bad), InvalidArgument);
        bad = opts;
        bad.size = 1;
        CHECK_THROWS_AS(roof_scren(build_pcs(kFixture), {0}, bad), InvalidArgument);
    }
    SUBCASE("violations propagate out of the search") {
        CHECK_THROWS_AS(minimize_roof(build_pcs(kFixture), [](const PureState&) { return -1.0; }, opts), MeasureViolation);
    }
}
