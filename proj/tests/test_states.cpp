#include <doctest.h>

#include "oracle.hpp"
#include "pcsmono/states.hpp"

#include <random>

using namespace pcsmono;

namespace {

std::vector<int> uniform_dims(int n, int d) { return std::vector<int>(static_cast<std::size_t>(n), d); }

PCSState random_pcs(int n, int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p = u(rng);
    const double lambda = u(rng);
    return PCSState{WClassCoefficients(oracle::random_coefficients(n, d, rng), d), PCSParams{p, lambda}};
}

}  // namespace

TEST_CASE("W-class coefficient validation") {
    Matrix a(2, 1);
    a << 1.0, 1.0;
    CHECK_THROWS_AS(WClassCoefficients(a, 2), InvalidArgument);
    Matrix wrong_cols(2, 2);
    wrong_cols << 1.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(WClassCoefficients(wrong_cols, 2), InvalidArgument);
    CHECK_THROWS_AS(validate(PCSParams{1.2, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(validate(PCSParams{0.5, -0.1}), InvalidArgument);
    CHECK(WClassCoefficients::standard(4, 3).weight(2) == doctest::Approx(0.25));
}

TEST_CASE("W-class state construction") {
    SUBCASE("standard three-qubit W") {
        const Vector w = build_w_state(WClassCoefficients::standard(3, 2)).amplitudes();
        const double c = 1.0 / std::sqrt(3.0);
        Vector expected = Vector::Zero(8);
        expected(4) = expected(2) = expected(1) = c;  // |100>, |010>, |001>
        CHECK(oracle::max_abs(w - expected) < 1e-15);
    }
    SUBCASE("n = 2, d = 3, a_11 = 1 gives |10>") {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 0) = 1.0;
        const Vector w = build_w_state(WClassCoefficients(a, 3)).amplitudes();
        CHECK(oracle::max_abs(w - oracle::product_ket({3, 3}, {1, 0})) == 0.0);
    }
    SUBCASE("random coefficients match the explicit tensor-product sum and are normalized") {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 2 + trial % 3;
            const int d = 2 + trial % 2;
            const Matrix a = oracle::random_coefficients(n, d, rng);
            const Vector w = build_w_state(WClassCoefficients(a, d)).amplitudes();
            CHECK(oracle::max_abs(w - oracle::w_ket(a, d)) < 1e-15);
            CHECK(std::abs(w.squaredNorm() - 1.0) < 1e-12);
            CHECK(w(0) == Complex(0.0));
        }
    }
}

TEST_CASE("coherent superposition") {
    const auto coeffs = WClassCoefficients::standard(3, 2);
    CHECK(build_coherent_superposition(coeffs, 1.0).amplitudes() == build_w_state(coeffs).amplitudes());
    CHECK(build_coherent_superposition(coeffs, 0.0).amplitudes() == oracle::vacuum_ket(3, 2));
    const Vector half = build_coherent_superposition(coeffs, 0.5).amplitudes();
    CHECK(std::abs(half(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    for (int k : {1, 2, 4}) CHECK(std::abs(half(k) - 1.0 / std::sqrt(6.0)) < 1e-15);
    CHECK_THROWS_AS(build_coherent_superposition(coeffs, 1.5), InvalidArgument);
}

TEST_CASE("PCS density matrices") {
    const auto coeffs = WClassCoefficients::standard(3, 2);
    const Vector w = oracle::w_ket(coeffs.a(), 2);
    const Vector z = oracle::vacuum_ket(3, 2);

    CHECK(oracle::max_abs(build_pcs({coeffs, {1.0, 0.4}}).entries() - w * w.adjoint()) < 1e-15);
    const Matrix mixture = 0.3 * w * w.adjoint() + 0.7 * z * z.adjoint();
    CHECK(oracle::max_abs(build_pcs({coeffs, {0.3, 0.0}}).entries() - mixture) < 1e-15);
    const Vector psi = build_coherent_superposition(coeffs, 0.3).amplitudes();
    CHECK(oracle::max_abs(build_pcs({coeffs, {0.3, 1.0}}).entries() - psi * psi.adjoint()) < 1e-15);

    SUBCASE("intermediate coherence interpolates the spectra") {
        const Eigen::VectorXd e0 = oracle::eigenvalues(build_pcs({coeffs, {0.3, 0.0}}).entries());
        const Eigen::VectorXd e1 = oracle::eigenvalues(build_pcs({coeffs, {0.3, 1.0}}).entries());
        const Eigen::VectorXd em = oracle::eigenvalues(build_pcs({coeffs, {0.3, 0.5}}).entries());
        const double top0 = e0.maxCoeff(), top1 = e1.maxCoeff(), topm = em.maxCoeff();
        CHECK(topm > top0);
        CHECK(topm < top1);
    }
    SUBCASE("random instances match the term-by-term formula, rank <= 2, support in span{W, 0}") {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 2 + trial % 4;
            const int d = 2 + trial % 2;
            const auto pcs = random_pcs(n, d, rng);
            const Matrix rho = build_pcs(pcs).entries();
            CHECK(oracle::max_abs(rho - oracle::pcs_matrix(pcs.coeffs.a(), d, pcs.params.p, pcs.params.lambda)) < 1e-14);
            Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
            const Vector wk = oracle::w_ket(pcs.coeffs.a(), d);
            const Vector zk = oracle::vacuum_ket(n, d);
            int rank = 0;
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
                if (es.eigenvalues()(k) <= 1e-10) continue;
                ++rank;
                const Vector v = es.eigenvectors().col(k);
                const Vector resid = v - wk * wk.dot(v) - zk * zk.dot(v);
                CHECK(resid.norm() < 1e-10);
            }
            CHECK(rank <= 2);
        }
    }
}

TEST_CASE("phase damping reproduces the PCS family") {
    SUBCASE("lambda = 1 is the identity channel") {
        std::mt19937_64 rng(6);
        const PureState psi(SubsystemLayout({2, 3}), oracle::random_ket(6, rng));
        CHECK(oracle::max_abs(phase_damp(psi, 1.0).entries() - psi.projector()) < 1e-15);
    }
    SUBCASE("grid of p and lambda on random coefficients") {
        std::mt19937_64 rng(7);
        const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
        for (int trial = 0; trial < 4; ++trial) {
            const int n = 3 + trial % 2;
            const int d = 2 + trial % 2;
            const Matrix a = oracle::random_coefficients(n, d, rng);
            const WClassCoefficients coeffs(a, d);
            for (double p : grid) {
                for (double lambda : grid) {
                    const auto damped = phase_damp(build_coherent_superposition(coeffs, p), lambda);
                    CHECK(oracle::max_abs(damped.entries() - oracle::pcs_matrix(a, d, p, lambda)) <= 1e-12);
                    CHECK(std::abs(damped.entries().trace() - 1.0) < 1e-12);
                }
            }
        }
    }
    SUBCASE("lambda = 0.7, p = 0.5, standard W") {
        const auto coeffs = WClassCoefficients::standard(3, 2);
        const auto damped = phase_damp(build_coherent_superposition(coeffs, 0.5), 0.7);
        CHECK(oracle::max_abs(damped.entries() - build_pcs({coeffs, {0.5, 0.7}}).entries()) <= 1e-12);
    }
    CHECK_THROWS_AS(phase_damp(build_w_state(WClassCoefficients::standard(3, 2)), 1.1), InvalidArgument);
}

TEST_CASE("symbolic reduction") {
    SUBCASE("standard W, p = 1/2, lambda = 1, trace the third party") {
        const PCSState pcs{WClassCoefficients::standard(3, 2), {0.5, 1.0}};
        const auto r = reduce_pcs_symbolic(pcs, {2});
        CHECK(r.params.p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(r.params.lambda == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
        CHECK(r.coeffs.n() == 2);
        const Matrix expected = oracle::partial_trace(oracle::pcs_matrix(pcs.coeffs.a(), 2, 0.5, 1.0), {2, 2, 2}, {0, 1});
        CHECK(oracle::max_abs(build_pcs(r).entries() - expected) < 1e-12);
    }
    SUBCASE("vacuum stays vacuum") {
        const PCSState pcs{WClassCoefficients::standard(4, 2), {0.0, 0.6}};
        const auto r = reduce_pcs_symbolic(pcs, {0, 3});
        CHECK(r.params.p == 0.0);
        CHECK(r.params.lambda == 0.6);
    }
    SUBCASE("p = 1 takes lambda' = 0 and matches the pure marginal") {
        const PCSState pcs{WClassCoefficients::standard(3, 2), {1.0, 0.8}};
        const auto r = reduce_pcs_symbolic(pcs, {1});
        CHECK(r.params.lambda == 0.0);
        CHECK(r.params.p == doctest::Approx(2.0 / 3.0));
        const Vector w = oracle::w_ket(pcs.coeffs.a(), 2);
        CHECK(oracle::max_abs(build_pcs(r).entries() - oracle::partial_trace(w * w.adjoint(), {2, 2, 2}, {0, 2})) < 1e-12);
    }
    SUBCASE("zero retained weight is an explicit error") {
        Matrix a = Matrix::Zero(3, 1);
        a(0, 0) = 1.0;
        const PCSState pcs{WClassCoefficients(a, 2), {0.5, 0.5}};
        CHECK_THROWS_AS(reduce_pcs_symbolic(pcs, {0}), DegenerateReduction);
        CHECK_THROWS_AS(reduce_pcs_symbolic(pcs, {0, 1, 2}), InvalidArgument);
    }
    SUBCASE("commutes with materialization; monotone; iterated equals joint") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 12; ++trial) {
            const int n = 3 + trial % 3;
            const int d = 2 + trial % 2;
            const auto pcs = random_pcs(n, d, rng);
            const auto dims = uniform_dims(n, d);
            const Matrix full = build_pcs(pcs).entries();
            std::vector<PartySet> traced_sets;
            for (int i = 0; i < n; ++i) {
                traced_sets.push_back({i});
                for (int j = i + 1; j < n; ++j) traced_sets.push_back({i, j});
            }
            for (const auto& traced : traced_sets) {
                const auto r = reduce_pcs_symbolic(pcs, traced);
                std::vector<int> keep;
                for (int k = 0; k < n; ++k)
                    if (std::find(traced.begin(), traced.end(), k) == traced.end()) keep.push_back(k);
                CHECK(oracle::max_abs(build_pcs(r).entries() - oracle::partial_trace(full, dims, keep)) <= 1e-12);
                CHECK(r.params.p <= pcs.params.p);
                CHECK(r.params.lambda <= pcs.params.lambda);
            }
            // Trace the first two parties one at a time, in both orders.
            const auto joint = reduce_pcs_symbolic(pcs, {0, 1});
            const auto a_then_b = reduce_pcs_symbolic(reduce_pcs_symbolic(pcs, {0}), {0});
            const auto b_then_a = reduce_pcs_symbolic(reduce_pcs_symbolic(pcs, {1}), {0});
            for (const auto& step : {a_then_b, b_then_a}) {
                CHECK(std::abs(step.params.p - joint.params.p) <= 1e-12);
                CHECK(std::abs(step.params.lambda - joint.params.lambda) <= 1e-12);
                CHECK(phase_insensitive_distance(step.coeffs.a(), joint.coeffs.a()) <= 1e-12);
            }
        }
    }
}

TEST_CASE("merging W-class coefficients") {
    const auto coeffs = WClassCoefficients::standard(3, 2);
    SUBCASE("singleton partition keeps the coefficients") {
        const auto same = merge_wclass_coeffs(coeffs, PartitionMap::singletons(3));
        CHECK(same.d() == 2);
        CHECK(same.a() == coeffs.a());
    }
    SUBCASE("relabeling places j at |0>|j> and jd at |j>|0>") {
        std::mt19937_64 rng(13);
        const int d = 3;
        const WClassCoefficients c(oracle::random_coefficients(3, d, rng), d);
        const auto b = merge_wclass_coeffs(c, PartitionMap({{0}, {1, 2}}, 3));
        CHECK(b.d() == 9);
        for (int j = 1; j < d; ++j) {
            CHECK(b.a()(1, j - 1) == c.a()(2, j - 1));
            CHECK(b.a()(1, j * d - 1) == c.a()(1, j - 1));
            CHECK(b.a()(0, j - 1) == c.a()(0, j - 1));
        }
    }
    SUBCASE("merged W state equals the merged amplitudes embedded in the uniform layout") {
        std::mt19937_64 rng(14);
        for (const auto& groups : std::vector<std::vector<PartySet>>{{{0}, {1, 2}}, {{0, 2}, {1}}, {{0, 1}, {2, 3}}, {{1}, {0, 2, 3}}}) {
            int n = 0;
            for (const auto& g : groups) n += static_cast<int>(g.size());
            const int d = 2;
            const WClassCoefficients c(oracle::random_coefficients(n, d, rng), d);
            const PartitionMap pmap(groups, n);
            const auto b = merge_wclass_coeffs(c, pmap);
            const auto merged = merge_parties(build_w_state(c), pmap);
            const auto embedded = embed_local_dims(merged, std::vector<int>(groups.size(), b.d()));
            CHECK(oracle::max_abs(build_w_state(b).amplitudes() - embedded.amplitudes()) <= 1e-12);
        }
    }
}

TEST_CASE("random W-class sampling") {
    const auto a = sample_random_wclass(4, 3, 7);
    const auto b = sample_random_wclass(4, 3, 7);
    CHECK(a.a() == b.a());
    CHECK(std::abs(a.a().squaredNorm() - 1.0) < 1e-12);
    CHECK(sample_random_wclass(4, 3, 8).a() != a.a());
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) mean += sample_random_wclass(3, 3, seed).weight(0);
    mean /= 100.0;
    CHECK(std::abs(mean - 1.0 / 3.0) < 0.05);
}

TEST_CASE("phase canonicalization") {
    std::mt19937_64 rng(15);
    const Matrix a = oracle::random_coefficients(3, 3, rng);
    const Matrix rotated = a * std::polar(1.0, 1.234);
    CHECK(phase_insensitive_distance(a, rotated) < 1e-15);
    Matrix other = a;
    other(0, 0) = -other(0, 0);
    CHECK(phase_insensitive_distance(a, other) > 1e-3);
}

TEST_CASE("structural PCS recognition") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pcs = random_pcs(3 + trial % 2, 2 + trial % 2, rng);
        const auto found = recognize_pcs(build_pcs(pcs));
        REQUIRE(found.has_value());
        CHECK(oracle::max_abs(build_pcs(*found).entries() - build_pcs(pcs).entries()) < 1e-10);
    }
    // A GHZ state has support outside span{W, vacuum}.
    Vector ghz = Vector::Zero(8);
    ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
    CHECK_FALSE(recognize_pcs(DensityMatrix::from_pure(PureState(SubsystemLayout({2, 2, 2}), ghz))).has_value());
    // A complex coherence phase is absorbed into the W-class coefficients.
    const auto coeffs = WClassCoefficients::standard(3, 2);
    const Vector w = build_w_state(coeffs).amplitudes();
    const Vector z = oracle::vacuum_ket(3, 2);
    const Complex c = std::polar(0.2, 0.9);
    const Matrix rho = 0.5 * w * w.adjoint() + 0.5 * z * z.adjoint() + c * w * z.adjoint() + std::conj(c) * z * w.adjoint();
    const auto rephased = recognize_pcs(DensityMatrix(SubsystemLayout({2, 2, 2}), rho));
    REQUIRE(rephased.has_value());
    CHECK(oracle::max_abs(build_pcs(*rephased).entries() - rho) < 1e-10);
    CHECK(rephased->params.lambda == doctest::Approx(0.4));
    CHECK(phase_insensitive_distance(rephased->coeffs.a(), coeffs.a()) < 1e-10);
}
