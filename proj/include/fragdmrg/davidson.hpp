#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "block_tensor.hpp"

namespace fragdmrg {

template <class Vec> struct VecOps;

template <> struct VecOps<BlockTensor> {
    static double dot(const BlockTensor &a, const BlockTensor &b) { return a.dot(b); }
    static void axpy(double a, const BlockTensor &x, BlockTensor &y) { y.axpy(a, x); }
    static void scale(double a, BlockTensor &x) { x.scale(a); }
    static void precondition(const BlockTensor &r, const BlockTensor &diag, double theta,
                             BlockTensor &out) {
        out = r;
        for (auto &[key, data] : out.blocks) {
            const auto *d = diag.find(key);
            for (std::size_t i = 0; i < data.size(); ++i) {
                double den = (d ? (*d)[i] : 0.0) - theta;
                if (std::fabs(den) < 1e-8)
                    den = den >= 0 ? 1e-8 : -1e-8;
                data[i] /= den;
            }
        }
    }
};

template <> struct VecOps<std::vector<double>> {
    static double dot(const std::vector<double> &a, const std::vector<double> &b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += a[i] * b[i];
        return s;
    }
    static void axpy(double a, const std::vector<double> &x, std::vector<double> &y) {
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] += a * x[i];
    }
    static void scale(double a, std::vector<double> &x) {
        for (double &v : x)
            v *= a;
    }
    static void precondition(const std::vector<double> &r, const std::vector<double> &diag,
                             double theta, std::vector<double> &out) {
        out = r;
        for (std::size_t i = 0; i < out.size(); ++i) {
            double den = diag[i] - theta;
            if (std::fabs(den) < 1e-8)
                den = den >= 0 ? 1e-8 : -1e-8;
            out[i] /= den;
        }
    }
};

template <class Vec> struct DavidsonResult {
    std::vector<double> eigenvalues;
    std::vector<Vec> eigenvectors;
    std::vector<double> residual_norms;
    int iterations = 0;
    long n_applies = 0;
};

struct DavidsonOptions {
    double tol = 1e-9;
    int max_iter = 200;
    int subspace_per_root = 20;
};

// Block Davidson for the lowest eigenpairs of a symmetric map. Restarts with
// the best Ritz vectors once the subspace cap is reached; preconditions
// residuals with the supplied diagonal when present.
template <class Vec, class Apply>
DavidsonResult<Vec> davidson(Apply &&apply, std::vector<Vec> guesses, int n_roots,
                             const DavidsonOptions &opt, const Vec *diag = nullptr) {
    using Ops = VecOps<Vec>;
    if (n_roots < 1 || guesses.empty())
        throw RankError("davidson needs n_roots >= 1 and at least one guess");

    const int cap = std::max(opt.subspace_per_root * n_roots, 2 * n_roots + 2);
    std::vector<Vec> basis, sigma;
    DavidsonResult<Vec> res;

    auto orthonormalize_push = [&](Vec v) -> bool {
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec &b : basis)
                Ops::axpy(-Ops::dot(b, v), b, v);
        const double nrm = std::sqrt(std::max(0.0, Ops::dot(v, v)));
        if (nrm < 1e-10)
            return false;
        Ops::scale(1.0 / nrm, v);
        basis.push_back(std::move(v));
        return true;
    };

    for (Vec &g : guesses)
        orthonormalize_push(std::move(g));
    if (basis.empty())
        throw ZeroNorm("davidson guess space is empty");

    Eigen::MatrixXd g_mat;
    std::vector<Vec> ritz_vecs;
    std::vector<double> ritz_vals, res_norms;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.iterations = iter + 1;
        while (sigma.size() < basis.size()) {
            sigma.push_back(apply(basis[sigma.size()]));
            ++res.n_applies;
        }
        const int nb = static_cast<int>(basis.size());
        g_mat.resize(nb, nb);
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j <= i; ++j)
                g_mat(i, j) = g_mat(j, i) = Ops::dot(basis[i], sigma[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_mat);

        const int nr = std::min(n_roots, nb);
        ritz_vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + nr);
        ritz_vecs.clear();
        std::vector<Vec> ritz_sigma;
        for (int r = 0; r < nr; ++r) {
            Vec v = basis[0];
            Ops::scale(es.eigenvectors()(0, r), v);
            Vec sv = sigma[0];
            Ops::scale(es.eigenvectors()(0, r), sv);
            for (int i = 1; i < nb; ++i) {
                Ops::axpy(es.eigenvectors()(i, r), basis[i], v);
                Ops::axpy(es.eigenvectors()(i, r), sigma[i], sv);
            }
            ritz_vecs.push_back(std::move(v));
            ritz_sigma.push_back(std::move(sv));
        }
        res_norms.clear();
        std::vector<Vec> residuals;
        for (int r = 0; r < nr; ++r) {
            Vec rv = ritz_sigma[r];
            Ops::axpy(-ritz_vals[r], ritz_vecs[r], rv);
            res_norms.push_back(std::sqrt(std::max(0.0, Ops::dot(rv, rv))));
            residuals.push_back(std::move(rv));
        }
        bool converged = nr == n_roots;
        for (int r = 0; r < nr; ++r)
            converged = converged && res_norms[r] <= opt.tol;
        if (converged) {
            res.eigenvalues = ritz_vals;
            res.eigenvectors = std::move(ritz_vecs);
            res.residual_norms = res_norms;
            return res;
        }

        if (nb >= cap) { // restart from the current Ritz space
            basis.clear();
            sigma.clear();
            for (int r = 0; r < nr; ++r)
                orthonormalize_push(ritz_vecs[r]);
        }
        bool grew = false;
        for (int r = 0; r < nr; ++r) {
            if (res_norms[r] <= opt.tol)
                continue;
            Vec t = residuals[r];
            if (diag)
                Ops::precondition(residuals[r], *diag, ritz_vals[r], t);
            if (orthonormalize_push(std::move(t)))
                grew = true;
            else if (orthonormalize_push(std::move(residuals[r]))) // raw fallback
                grew = true;
        }
        if (!grew) {
            // subspace already spans the reachable space; accept if tight
            bool near = nr == n_roots;
            for (int r = 0; r < nr; ++r)
                near = near && res_norms[r] <= std::max(opt.tol, 1e-9);
            res.eigenvalues = ritz_vals;
            res.eigenvectors = std::move(ritz_vecs);
            res.residual_norms = res_norms;
            if (near)
                return res;
            throw NoConvergence("davidson stagnated after " +
                                std::to_string(res.iterations) + " iterations");
        }
    }
    throw NoConvergence("davidson hit max_iterations=" + std::to_string(opt.max_iter));
}

} // namespace fragdmrg
