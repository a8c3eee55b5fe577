#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gridfire/errors.hpp"
#include "gridfire/solver.hpp"

namespace gridfire::detail {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Eigen::VectorXd;

// min c'x  s.t.  A x = b,  G x + s = h,  s in (R+^m_lin) x SOC(d_1) x ...
struct ConeData {
    int n = 0, p = 0, m = 0, m_lin = 0;
    std::vector<int> soc_dims;
    std::vector<int> soc_offsets;  // into the m-vector
    SpMat A, G;
    VectorXd b, h, c;
    double obj_constant = 0.0;
    double obj_scale = 1.0;
    VectorXd col_scale;  // x_original = col_scale .* x_solved
};

ConeData build_cone_data(const ConicProgram& prog) {
    ConeData d;
    d.n = prog.num_variables();
    std::vector<Triplet> ta, tg;
    std::vector<double> b, h;

    for (const auto& row : prog.rows()) {
        if (row.sense == RowSense::Eq) {
            for (const auto& t : row.expr.terms) ta.emplace_back(static_cast<int>(b.size()), t.var, t.coef);
            b.push_back(row.rhs - row.expr.offset);
        } else {
            for (const auto& t : row.expr.terms) tg.emplace_back(static_cast<int>(h.size()), t.var, t.coef);
            h.push_back(row.rhs - row.expr.offset);
        }
    }
    for (int j = 0; j < d.n; ++j) {
        const auto& v = prog.variables()[static_cast<size_t>(j)];
        if (std::isfinite(v.ub)) {
            tg.emplace_back(static_cast<int>(h.size()), j, 1.0);
            h.push_back(v.ub);
        }
        if (std::isfinite(v.lb)) {
            tg.emplace_back(static_cast<int>(h.size()), j, -1.0);
            h.push_back(-v.lb);
        }
    }
    d.m_lin = static_cast<int>(h.size());
    for (const auto& cone : prog.cones()) {
        d.soc_offsets.push_back(static_cast<int>(h.size()));
        d.soc_dims.push_back(static_cast<int>(cone.exprs.size()));
        for (const auto& e : cone.exprs) {
            // s_row = h - G x = offset + expr(x)
            for (const auto& t : e.terms) tg.emplace_back(static_cast<int>(h.size()), t.var, -t.coef);
            h.push_back(e.offset);
        }
    }
    d.p = static_cast<int>(b.size());
    d.m = static_cast<int>(h.size());
    d.A.resize(d.p, d.n);
    d.A.setFromTriplets(ta.begin(), ta.end());
    d.G.resize(d.m, d.n);
    d.G.setFromTriplets(tg.begin(), tg.end());
    d.b = Eigen::Map<VectorXd>(b.data(), d.p);
    d.h = Eigen::Map<VectorXd>(h.data(), d.m);
    d.c = VectorXd::Zero(d.n);
    for (const auto& t : prog.objective()) d.c[t.var] += t.coef;
    d.obj_constant = prog.objective_constant();
    d.col_scale = VectorXd::Ones(d.n);
    return d;
}

// Ruiz equilibration; rows of one SOC block share a factor so membership
// is preserved.
void equilibrate(ConeData& d) {
    if (d.n == 0) return;
    VectorXd ra = VectorXd::Ones(d.p), rg = VectorXd::Ones(d.m), cs = VectorXd::Ones(d.n);
    for (int pass = 0; pass < 3; ++pass) {
        VectorXd rowmax_a = VectorXd::Zero(d.p), rowmax_g = VectorXd::Zero(d.m), colmax = VectorXd::Zero(d.n);
        for (int k = 0; k < d.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(d.A, k); it; ++it) {
                rowmax_a[it.row()] = std::max(rowmax_a[it.row()], std::abs(it.value()));
                colmax[it.col()] = std::max(colmax[it.col()], std::abs(it.value()));
            }
        for (int k = 0; k < d.G.outerSize(); ++k)
            for (SpMat::InnerIterator it(d.G, k); it; ++it) {
                rowmax_g[it.row()] = std::max(rowmax_g[it.row()], std::abs(it.value()));
                colmax[it.col()] = std::max(colmax[it.col()], std::abs(it.value()));
            }
        for (size_t ci = 0; ci < d.soc_dims.size(); ++ci) {
            const int off = d.soc_offsets[ci], dim = d.soc_dims[ci];
            double blockmax = 0.0;
            for (int r = 0; r < dim; ++r) blockmax = std::max(blockmax, rowmax_g[off + r]);
            for (int r = 0; r < dim; ++r) rowmax_g[off + r] = blockmax;
        }
        auto scale_of = [](double mx) { return mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0; };
        VectorXd sa = rowmax_a.unaryExpr(scale_of), sg = rowmax_g.unaryExpr(scale_of),
                 sc = colmax.unaryExpr(scale_of);
        d.A = sa.asDiagonal() * d.A * sc.asDiagonal();
        d.G = sg.asDiagonal() * d.G * sc.asDiagonal();
        ra = ra.cwiseProduct(sa);
        rg = rg.cwiseProduct(sg);
        cs = cs.cwiseProduct(sc);
    }
    d.b = ra.cwiseProduct(d.b);
    d.h = rg.cwiseProduct(d.h);
    d.c = cs.cwiseProduct(d.c);
    d.col_scale = cs;
    d.obj_scale = std::max(1.0, d.c.lpNorm<Eigen::Infinity>());
    d.c /= d.obj_scale;
}

struct ConeOps {
    const ConeData* d;

    double dot(const VectorXd& u, const VectorXd& v) const { return u.dot(v); }

    VectorXd unit() const {
        VectorXd e = VectorXd::Zero(d->m);
        e.head(d->m_lin).setOnes();
        for (size_t ci = 0; ci < d->soc_dims.size(); ++ci) e[d->soc_offsets[ci]] = 1.0;
        return e;
    }

    double degree() const { return static_cast<double>(d->m_lin + static_cast<int>(d->soc_dims.size())); }

    // distance to the cone along the unit element; <= 0 means interior
    double interior_violation(const VectorXd& u) const {
        double alpha = -kInf;
        for (int i = 0; i < d->m_lin; ++i) alpha = std::max(alpha, -u[i]);
        for (size_t ci = 0; ci < d->soc_dims.size(); ++ci) {
            const int off = d->soc_offsets[ci], dim = d->soc_dims[ci];
            alpha = std::max(alpha, u.segment(off + 1, dim - 1).norm() - u[off]);
        }
        return alpha;
    }

    double step_to_boundary(const VectorXd& u, const VectorXd& du) const {
        double alpha = kInf;
        for (int i = 0; i < d->m_lin; ++i)
            if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
        for (size_t ci = 0; ci < d->soc_dims.size(); ++ci) {
            const int off = d->soc_offsets[ci], dim = d->soc_dims[ci];
            const double u0 = u[off], du0 = du[off];
            auto u1 = u.segment(off + 1, dim - 1);
            auto du1 = du.segment(off + 1, dim - 1);
            const double a = du0 * du0 - du1.squaredNorm();
            const double bq = 2.0 * (u0 * du0 - u1.dot(du1));
            const double cq = u0 * u0 - u1.squaredNorm();
            double root = kInf;
            if (std::abs(a) < 1e-300) {
                if (bq < 0.0) root = -cq / bq;
            } else {
                const double disc = bq * bq - 4.0 * a * cq;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    const double r1 = (-bq - sq) / (2.0 * a);
                    const double r2 = (-bq + sq) / (2.0 * a);
                    for (double r : {std::min(r1, r2), std::max(r1, r2)})
                        if (r > 0.0 && u0 + r * du0 >= 0.0) {
                            root = r;
                            break;
                        }
                    if (root == kInf && a < 0.0) root = std::max(r1, r2) > 0.0 ? std::max(r1, r2) : kInf;
                }
            }
            if (du0 < 0.0) root = std::min(root, -u0 / du0);
            alpha = std::min(alpha, root);
        }
        return alpha;
    }
};

// Nesterov-Todd scaling: W z = W^{-1} s = lambda.
struct Scaling {
    VectorXd w_lin;                 // sqrt(s/z)
    std::vector<VectorXd> wbar;     // unit hyperbolic vectors, one per SOC
    std::vector<double> eta;
    VectorXd lambda;
};

double jnorm(const Eigen::Ref<const VectorXd>& u) {
    const double q = u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
    return std::sqrt(std::max(q, 1e-300));
}

Scaling compute_scaling(const ConeData& d, const VectorXd& s, const VectorXd& z) {
    Scaling W;
    W.w_lin = (s.head(d.m_lin).cwiseQuotient(z.head(d.m_lin))).cwiseSqrt();
    W.lambda = VectorXd::Zero(d.m);
    W.lambda.head(d.m_lin) = (s.head(d.m_lin).cwiseProduct(z.head(d.m_lin))).cwiseSqrt();
    for (size_t ci = 0; ci < d.soc_dims.size(); ++ci) {
        const int off = d.soc_offsets[ci], dim = d.soc_dims[ci];
        VectorXd sk = s.segment(off, dim), zk = z.segment(off, dim);
        const double ns = jnorm(sk), nz = jnorm(zk);
        VectorXd sb = sk / ns, zb = zk / nz;
        const double gamma = std::sqrt(std::max((1.0 + sb.dot(zb)) / 2.0, 1e-300));
        VectorXd wb(dim);
        wb[0] = (sb[0] + zb[0]) / (2.0 * gamma);
        wb.tail(dim - 1) = (sb.tail(dim - 1) - zb.tail(dim - 1)) / (2.0 * gamma);
        const double eta = std::sqrt(ns / nz);
        W.wbar.push_back(wb);
        W.eta.push_back(eta);
        // lambda = W z, evaluated with the H(wbar) formula
        const double wz = wb[0] * zk[0] + wb.tail(dim - 1).dot(zk.tail(dim - 1));
        VectorXd lam(dim);
        lam[0] = eta * wz;
        lam.tail(dim - 1) =
            eta * (zk.tail(dim - 1) +
                   (zk[0] + (wb.tail(dim - 1).dot(zk.tail(dim - 1))) / (1.0 + wb[0])) * wb.tail(dim - 1));
        W.lambda.segment(off, dim) = lam;
    }
    return W;
}

// W v (symmetric). inverse=true applies W^{-1}.
VectorXd apply_W(const ConeData& d, const Scaling& W, const VectorXd& v, bool inverse) {
    VectorXd out = VectorXd::Zero(d.m);
    if (inverse)
        out.head(d.m_lin) = v.head(d.m_lin).cwiseQuotient(W.w_lin);
    else
        out.head(d.m_lin) = v.head(d.m_lin).cwiseProduct(W.w_lin);
    for (size_t ci = 0; ci < d.soc_dims.size(); ++ci) {
        const int off = d.soc_offsets[ci], dim = d.soc_dims[ci];
        const VectorXd& wb = W.wbar[ci];
        const double eta = inverse ? 1.0 / W.eta[ci] : W.eta[ci];
        VectorXd vk = v.segment(off, dim);
        const double sgn = inverse ? -1.0 : 1.0;  // H(wbar)^{-1} = H(J wbar)
        const double wv = wb[0] * vk[0] + sgn * wb.tail(dim - 1).dot(vk.tail(dim - 1));
        VectorXd r(dim);
        r[0] = eta * wv;
        r.tail(dim - 1) =
            eta * (vk.tail(dim - 1) +
                   sgn * (vk[0] + sgn * (wb.tail(dim - 1).dot(vk.tail(dim - 1))) / (1.0 + wb[0])) *
                       wb.tail(dim - 1));
        out.segment(off, dim) = r;
    }
    return out;
}

VectorXd jordan_mul(const ConeData& d, const VectorXd& u, const VectorXd& v) {
    VectorXd out = VectorXd::Zero(d.m);
    out.head(d.m_lin) = u.head(d.m_lin).cwiseProduct(v.head(d.m_lin));
    for (size_t ci = 0; ci < d.soc_dims.size(); ++ci) {
        const int off = d.soc_offsets[ci], dim = d.soc_dims[ci];
        auto uk = u.segment(off, dim);
        auto vk = v.segment(off, dim);
        out[off] = uk.dot(vk);
        out.segment(off + 1, dim - 1) = uk[0] * vk.tail(dim - 1) + vk[0] * uk.tail(dim - 1);
    }
    return out;
}

// solve lambda o u = y for u
VectorXd jordan_div(const ConeData& d, const VectorXd& lambda, const VectorXd& y) {
    VectorXd out = VectorXd::Zero(d.m);
    out.head(d.m_lin) = y.head(d.m_lin).cwiseQuotient(lambda.head(d.m_lin));
    for (size_t ci = 0; ci < d.soc_dims.size(); ++ci) {
        const int off = d.soc_offsets[ci], dim = d.soc_dims[ci];
        auto l = lambda.segment(off, dim);
        auto yk = y.segment(off, dim);
        const double det = l[0] * l[0] - l.tail(dim - 1).squaredNorm();
        const double l1y = l.tail(dim - 1).dot(yk.tail(dim - 1));
        out[off] = (l[0] * yk[0] - l1y) / det;
        out.segment(off + 1, dim - 1) =
            (l1y / l[0] - yk[0]) / det * l.tail(dim - 1) + yk.tail(dim - 1) / l[0];
    }
    return out;
}

struct KktSolver {
    const ConeData* d;
    SpMat K;
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
    std::vector<std::ptrdiff_t> lin_slots;                  // value indices of the -W^2 diag (LP)
    std::vector<std::vector<std::ptrdiff_t>> soc_slots;     // dense block entries, row-major lower
    double delta = 1e-8;
    bool analyzed = false;

    explicit KktSolver(const ConeData& data) : d(&data) {
        const int n = d->n, p = d->p, m = d->m;
        std::vector<Triplet> trip;
        for (int i = 0; i < n; ++i) trip.emplace_back(i, i, delta);
        for (int k = 0; k < d->A.outerSize(); ++k)
            for (SpMat::InnerIterator it(d->A, k); it; ++it) {
                trip.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
                trip.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()), it.value());
            }
        for (int i = 0; i < p; ++i) trip.emplace_back(n + i, n + i, -delta);
        for (int k = 0; k < d->G.outerSize(); ++k)
            for (SpMat::InnerIterator it(d->G, k); it; ++it) {
                trip.emplace_back(n + p + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
                trip.emplace_back(static_cast<int>(it.col()), n + p + static_cast<int>(it.row()), it.value());
            }
        for (int i = 0; i < d->m_lin; ++i) trip.emplace_back(n + p + i, n + p + i, -1.0 - delta);
        for (size_t ci = 0; ci < d->soc_dims.size(); ++ci) {
            const int off = n + p + d->soc_offsets[ci], dim = d->soc_dims[ci];
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) trip.emplace_back(off + r, off + c, r == c ? -1.0 - delta : 0.0);
        }
        K.resize(n + p + m, n + p + m);
        K.setFromTriplets(trip.begin(), trip.end());
        K.makeCompressed();

        lin_slots.resize(static_cast<size_t>(d->m_lin));
        for (int i = 0; i < d->m_lin; ++i)
            lin_slots[static_cast<size_t>(i)] = &K.coeffRef(n + p + i, n + p + i) - K.valuePtr();
        soc_slots.resize(d->soc_dims.size());
        for (size_t ci = 0; ci < d->soc_dims.size(); ++ci) {
            const int off = n + p + d->soc_offsets[ci], dim = d->soc_dims[ci];
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c)
                    soc_slots[ci].push_back(&K.coeffRef(off + r, off + c) - K.valuePtr());
        }
    }

    bool factorize(const Scaling& W) {
        double* vals = K.valuePtr();
        for (int i = 0; i < d->m_lin; ++i)
            vals[lin_slots[static_cast<size_t>(i)]] = -W.w_lin[i] * W.w_lin[i] - delta;
        for (size_t ci = 0; ci < d->soc_dims.size(); ++ci) {
            const int dim = d->soc_dims[ci];
            const VectorXd& wb = W.wbar[ci];
            const double e2 = W.eta[ci] * W.eta[ci];
            size_t slot = 0;
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) {
                    // W^2 = eta^2 (2 wbar wbar' - J)
                    double v = 2.0 * e2 * wb[r] * wb[c];
                    if (r == c) v -= e2 * (r == 0 ? 1.0 : -1.0);
                    vals[soc_slots[ci][slot++]] = -v - (r == c ? delta : 0.0);
                }
        }
        if (!analyzed) {
            ldlt.analyzePattern(K);
            analyzed = true;
        }
        ldlt.factorize(K);
        return ldlt.info() == Eigen::Success;
    }

    // Unregularized KKT application for iterative refinement.
    VectorXd apply(const Scaling& W, const VectorXd& v) const {
        const int n = d->n, p = d->p, m = d->m;
        VectorXd x = v.head(n), y = v.segment(n, p), z = v.tail(m);
        VectorXd r(n + p + m);
        r.head(n) = d->A.transpose() * y + d->G.transpose() * z;
        r.segment(n, p) = d->A * x;
        r.tail(m) = d->G * x - apply_W(*d, W, apply_W(*d, W, z, false), false);
        return r;
    }

    VectorXd solve(const Scaling& W, const VectorXd& rhs) const {
        VectorXd sol = ldlt.solve(rhs);
        for (int ref = 0; ref < 2; ++ref) {
            VectorXd resid = rhs - apply(W, sol);
            sol += ldlt.solve(resid);
        }
        return sol;
    }
};

struct IterateView {
    VectorXd x, y, z, s;
};

}  // namespace

Solution solve_continuous(const ConicProgram& program, const SolverOptions& opts) {
    ConeData d = build_cone_data(program);
    Solution sol;

    if (d.n == 0) {
        sol.status = SolveStatus::Optimal;
        sol.objective = d.obj_constant;
        sol.best_bound = d.obj_constant;
        return sol;
    }
    if (d.m == 0) {
        // equality-only program; stationarity via a regularized normal solve
        SpMat K(d.n + d.p, d.n + d.p);
        std::vector<Triplet> trip;
        for (int i = 0; i < d.n; ++i) trip.emplace_back(i, i, 1e-10);
        for (int k = 0; k < d.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(d.A, k); it; ++it) {
                trip.emplace_back(d.n + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
                trip.emplace_back(static_cast<int>(it.col()), d.n + static_cast<int>(it.row()), it.value());
            }
        for (int i = 0; i < d.p; ++i) trip.emplace_back(d.n + i, d.n + i, -1e-10);
        K.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt(K);
        VectorXd rhs(d.n + d.p);
        rhs.head(d.n) = -d.c;
        rhs.tail(d.p) = d.b;
        VectorXd xy = ldlt.solve(rhs);
        VectorXd x = xy.head(d.n);
        if ((d.A.transpose() * xy.tail(d.p) + d.c).norm() > 1e-6 * std::max(1.0, d.c.norm())) {
            sol.status = SolveStatus::Unbounded;
            return sol;
        }
        if (d.p > 0 && (d.A * x - d.b).norm() > 1e-7 * std::max(1.0, d.b.norm())) {
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
        sol.status = SolveStatus::Optimal;
        sol.x.assign(x.data(), x.data() + d.n);
        sol.objective = d.c.dot(x) * d.obj_scale + d.obj_constant;
        sol.best_bound = sol.objective;
        return sol;
    }

    equilibrate(d);
    ConeOps ops{&d};
    KktSolver kkt(d);

    const double nu = ops.degree();
    const VectorXd e = ops.unit();

    // ---- initialization ----
    Scaling Wid;
    Wid.w_lin = VectorXd::Ones(d.m_lin);
    Wid.lambda = VectorXd::Zero(d.m);
    for (size_t ci = 0; ci < d.soc_dims.size(); ++ci) {
        VectorXd wb = VectorXd::Zero(d.soc_dims[ci]);
        wb[0] = 1.0;
        Wid.wbar.push_back(wb);
        Wid.eta.push_back(1.0);
    }
    if (!kkt.factorize(Wid)) {
        sol.status = SolveStatus::NumericalFailure;
        return sol;
    }

    VectorXd rhs(d.n + d.p + d.m);
    rhs.setZero();
    rhs.segment(d.n, d.p) = d.b;
    rhs.tail(d.m) = d.h;
    VectorXd init1 = kkt.solve(Wid, rhs);
    VectorXd x = init1.head(d.n);
    VectorXd s = -(init1.tail(d.m));
    s = d.h - d.G * x;  // consistent slack
    double alpha_p = ops.interior_violation(s);
    if (alpha_p >= 0.0) s += (1.0 + alpha_p) * e;

    rhs.setZero();
    rhs.head(d.n) = -d.c;
    VectorXd init2 = kkt.solve(Wid, rhs);
    VectorXd y = init2.segment(d.n, d.p);
    VectorXd z = init2.tail(d.m);
    double alpha_d = ops.interior_violation(z);
    if (alpha_d >= 0.0) z += (1.0 + alpha_d) * e;

    const double bnorm = std::max(1.0, d.b.norm());
    const double hnorm = std::max(1.0, d.h.norm());
    const double cnorm = std::max(1.0, d.c.norm());

    auto finish = [&](SolveStatus status) {
        sol.status = status;
        VectorXd xs = d.col_scale.cwiseProduct(x);
        sol.x.assign(xs.data(), xs.data() + d.n);
        const double pcost = d.c.dot(x) * d.obj_scale + d.obj_constant;
        const double dcost = (-d.b.dot(y) - d.h.dot(z)) * d.obj_scale + d.obj_constant;
        sol.objective = pcost;
        sol.best_bound = std::min(pcost, dcost);
        return sol;
    };

    for (int iter = 0; iter < opts.ipm_max_iters; ++iter) {
        sol.ipm_iterations = iter;
        VectorXd rx = d.c + d.A.transpose() * y + d.G.transpose() * z;
        VectorXd ry = d.A * x - d.b;
        VectorXd rz = d.G * x + s - d.h;
        const double gap = s.dot(z);
        const double mu = gap / nu;
        const double pcost = d.c.dot(x);
        const double dcost = -d.b.dot(y) - d.h.dot(z);
        const double pres = std::max(ry.norm() / bnorm, rz.norm() / hnorm);
        const double dres = rx.norm() / cnorm;
        const double relgap = std::abs(pcost - dcost) / std::max({1.0, std::abs(pcost), std::abs(dcost)});

        if (opts.verbose)
            std::fprintf(stderr, "ipm %3d pcost %+.6e gap %.3e pres %.3e dres %.3e\n", iter, pcost,
                         relgap, pres, dres);

        if (pres <= opts.feas_tol && dres <= opts.feas_tol &&
            (relgap <= opts.rel_gap || gap <= opts.abs_gap))
            return finish(SolveStatus::Optimal);

        // certificates on normalized iterates
        const double cert_p = -(d.b.dot(y) + d.h.dot(z));
        if (cert_p > 1e-8) {
            const double res = (d.A.transpose() * y + d.G.transpose() * z).norm() / cert_p;
            if (res <= opts.feas_tol * 100.0) return finish(SolveStatus::Infeasible);
        }
        const double cert_d = -d.c.dot(x);
        if (cert_d > 1e-8) {
            const double res =
                std::max((d.A * x).norm(), (d.G * x + s - VectorXd::Zero(d.m)).norm() * 0.0 +
                                               (d.G * x + s).norm()) /
                cert_d;
            if (res <= opts.feas_tol * 100.0 && pres > std::sqrt(opts.feas_tol))
                return finish(SolveStatus::Unbounded);
        }

        Scaling W = compute_scaling(d, s, z);
        bool ok = kkt.factorize(W);
        for (int bump = 0; !ok && bump < 3; ++bump) {
            kkt.delta *= 100.0;
            ok = kkt.factorize(W);
        }
        if (!ok) return finish(SolveStatus::NumericalFailure);

        // affine scaling direction
        VectorXd r_aff(d.n + d.p + d.m);
        r_aff.head(d.n) = -rx;
        r_aff.segment(d.n, d.p) = -ry;
        r_aff.tail(d.m) = -rz + s;
        VectorXd dir = kkt.solve(W, r_aff);
        VectorXd dx_a = dir.head(d.n), dy_a = dir.segment(d.n, d.p), dz_a = dir.tail(d.m);
        VectorXd ds_a = -rz - d.G * dx_a;

        double step_aff = std::min({1.0, ops.step_to_boundary(s, ds_a), ops.step_to_boundary(z, dz_a)});
        const double mu_aff = (s + step_aff * ds_a).dot(z + step_aff * dz_a) / nu;
        double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

        // combined direction with Mehrotra correction
        VectorXd corr = jordan_mul(d, apply_W(d, W, ds_a, true), apply_W(d, W, dz_a, false));
        VectorXd dvec = jordan_mul(d, W.lambda, W.lambda) + corr - sigma * mu * e;
        VectorXd wd = apply_W(d, W, jordan_div(d, W.lambda, dvec), false);
        VectorXd r_cmb(d.n + d.p + d.m);
        r_cmb.head(d.n) = -rx;
        r_cmb.segment(d.n, d.p) = -ry;
        r_cmb.tail(d.m) = -rz + wd;
        dir = kkt.solve(W, r_cmb);
        VectorXd dx = dir.head(d.n), dy = dir.segment(d.n, d.p), dz = dir.tail(d.m);
        VectorXd ds = -wd - apply_W(d, W, apply_W(d, W, dz, false), false);

        double alpha = std::min({1.0, ops.step_to_boundary(s, ds), ops.step_to_boundary(z, dz)});
        alpha *= 0.99;
        if (!(alpha > 1e-13)) return finish(SolveStatus::NumericalFailure);

        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
    }
    return finish(SolveStatus::NumericalFailure);
}

}  // namespace gridfire::detail
