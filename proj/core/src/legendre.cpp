#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "truncld/error.hpp"
#include "truncld/ratefn.hpp"

namespace truncld {

std::string to_string(ConjugateResult::Status s) {
    switch (s) {
        case ConjugateResult::Status::Converged: return "converged";
        case ConjugateResult::Status::Diverged: return "diverged";
        case ConjugateResult::Status::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

ConjugateResult legendre(const RateFunction& rf, const Vector& x, const LegendreOptions& opt) {
    if (x.size() != rf.dim()) throw_invalid("legendre: x has the wrong dimension");
    const int d = rf.dim();
    const double target = opt.tol * (1.0 + x.norm());

    ConjugateResult res;
    Vector lam = Vector::Zero(d);
    double lv = 0.0;
    Vector g;
    Matrix h;
    rf.evaluate(lam, &lv, &g, &h);
    double obj = lam.dot(x) - lv;
    double ascent_step = 1.0;

    for (int it = 0; it <= opt.max_iter; ++it) {
        const Vector resid = x - g;  // gradient of the concave objective
        res.iterations = it;
        res.residual = resid.norm();
        if (res.residual <= target) {
            res.status = ConjugateResult::Status::Converged;
            res.value = std::max(0.0, obj);
            res.argmax = lam;
            return res;
        }
        if (it == opt.max_iter) break;

        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const double emax = es.eigenvalues().maxCoeff();
        const double emin = es.eigenvalues().minCoeff();
        Vector dir;
        bool newton = emin > 1e-12 * std::max(1.0, emax);
        if (newton) {
            dir = es.eigenvectors() * (es.eigenvalues().cwiseInverse().asDiagonal() *
                                       (es.eigenvectors().transpose() * resid));
        } else {
            dir = ascent_step * resid;
        }

        // Keep trial points within 1.5x the escape radius so exp() stays finite.
        double t = 1.0;
        const double limit = 1.5 * opt.escape_radius;
        if ((lam + dir).norm() > limit) {
            double lo = 0.0, hi = 1.0;
            for (int b = 0; b < 60; ++b) {
                const double mid = 0.5 * (lo + hi);
                ((lam + mid * dir).norm() > limit ? hi : lo) = mid;
            }
            t = lo;
        }

        const double slope = resid.dot(dir);
        bool accepted = false;
        Vector trial;
        double tv = 0.0;
        Vector tg;
        Matrix th;
        for (int bt = 0; bt < 60; ++bt) {
            trial = lam + t * dir;
            rf.evaluate(trial, &tv, &tg, &th);
            const double tobj = trial.dot(x) - tv;
            // Near the optimum the objective moves by less than its rounding error, so
            // Armijo alone stalls; there a smaller gradient residual is the better test.
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                                 (1.0 + std::abs(tv) + std::abs(trial.dot(x)));
            const bool armijo = tobj >= obj + opt.armijo_slope * t * slope;
            const bool flat = std::abs(tobj - obj) <= noise && (x - tg).norm() < res.residual;
            if (std::isfinite(tobj) && (armijo || flat)) {
                accepted = true;
                obj = tobj;
                break;
            }
            t *= opt.backtrack;
        }
        if (!accepted) {
            // No ascent possible at machine precision; report where we stand.
            break;
        }
        if (!newton) ascent_step = std::min(1e6, ascent_step * (t == 1.0 ? 2.0 : 1.0) * (t < 1.0 ? t : 1.0));
        lam = trial;
        g = tg;
        h = th;
        if (lam.norm() > opt.escape_radius) {
            res.status = ConjugateResult::Status::Diverged;
            res.value = std::numeric_limits<double>::infinity();
            res.argmax = lam;
            res.residual = (x - g).norm();
            res.iterations = it + 1;
            return res;
        }
    }
    res.status = ConjugateResult::Status::MaxIterations;
    res.value = std::max(0.0, obj);
    res.argmax = lam;
    res.residual = (x - g).norm();
    return res;
}

}  // namespace truncld
