#include "pcsmono/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pcsmono {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Run {
    std::vector<double> x;
    double f;
    bool converged;
};

Run run_simplex(const Objective& f, const std::vector<double>& x0, const SimplexOptions& opts, int& evaluations) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);

    auto eval = [&](const std::vector<double>& x) {
        ++evaluations;
        return f(x);
    };

    vals[0] = eval(pts[0]);
    for (std::size_t k = 0; k < n; ++k) {
        pts[k + 1][k] += opts.initial_step;
        vals[k + 1] = eval(pts[k + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        if (vals[worst] - vals[best] <= opts.ftol) return {pts[best], vals[best], true};
        if (evaluations >= opts.max_evaluations) return {pts[best], vals[best], false};

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t c = 0; c < n; ++c) centroid[c] += pts[k][c];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        for (std::size_t c = 0; c < n; ++c) trial[c] = centroid[c] + kReflect * (centroid[c] - pts[worst][c]);
        const double f_reflect = eval(trial);

        if (f_reflect < vals[best]) {
            for (std::size_t c = 0; c < n; ++c) trial2[c] = centroid[c] + kExpand * (trial[c] - centroid[c]);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                pts[worst] = trial2;
                vals[worst] = f_expand;
            } else {
                pts[worst] = trial;
                vals[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < vals[second]) {
            pts[worst] = trial;
            vals[worst] = f_reflect;
            continue;
        }

        // contraction, outside if the reflection improved on the worst point
        const bool outside = f_reflect < vals[worst];
        const auto& anchor = outside ? trial : pts[worst];
        for (std::size_t c = 0; c < n; ++c) trial2[c] = centroid[c] + kContract * (anchor[c] - centroid[c]);
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : vals[worst])) {
            pts[worst] = trial2;
            vals[worst] = f_contract;
            continue;
        }

        for (std::size_t k = 0; k <= n; ++k) {
            if (k == best) continue;
            for (std::size_t c = 0; c < n; ++c) pts[k][c] = pts[best][c] + kShrink * (pts[k][c] - pts[best][c]);
            vals[k] = eval(pts[k]);
        }
    }
}

}  // namespace

SimplexResult minimize_simplex(const Objective& f, std::vector<double> x0, const SimplexOptions& opts) {
    if (x0.empty()) throw std::invalid_argument("simplex search needs at least one parameter");
    int evaluations = 0;
    Run run = run_simplex(f, x0, opts, evaluations);
    for (int k = 0; k < opts.restarts && run.converged && evaluations < opts.max_evaluations; ++k) {
        Run again = run_simplex(f, run.x, opts, evaluations);
        const bool improved = again.f < run.f - opts.ftol;
        if (again.f < run.f) run = again;
        else run.converged = again.converged;
        if (!improved) break;
    }
    return SimplexResult{std::move(run.x), run.f, evaluations, run.converged};
}

}  // namespace pcsmono
