#include "contentlab/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace contentlab {

namespace {

std::int64_t vec_gcd(const std::vector<std::int64_t>& v) {
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
    return g;
}

void canonicalize_sign(std::vector<std::int64_t>& v) {
    for (auto x : v) {
        if (x > 0) return;
        if (x < 0) {
            for (auto& y : v) y = -y;
            return;
        }
    }
}

double int_norm(const std::vector<std::int64_t>& v) {
    double s = 0.0;
    for (auto x : v) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
}

double pow_int(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

LatticeBox dilated_cube_box(const DyadicCube& cube, int K, int c0, bool* clipped) {
    if (c0 != 1 && c0 != 3)
        throw std::invalid_argument("dilated_cube_box: c0 must be 1 or 3");
    const std::int64_t span = cube.span_at(K);
    const std::int64_t top = std::int64_t{1} << K;
    const auto base = cube.corner_at(K);
    LatticeBox box;
    bool clip = false;
    const std::int64_t pad = (c0 - 1) / 2 * span;
    for (std::size_t i = 0; i < base.size(); ++i) {
        std::int64_t lo = base[i] - pad;
        std::int64_t hi = base[i] + span + pad;
        if (lo < 0) {
            lo = 0;
            clip = true;
        }
        if (hi > top) {
            hi = top;
            clip = true;
        }
        box.lo.push_back(lo);
        box.hi.push_back(hi);
    }
    if (clipped) *clipped = clip;
    return box;
}

DiffStats collect_diff_stats(const GridMap& f, const LatticeBox& box) {
    const auto lat = f.lattice();
    const auto idx = lat.box_indices(box.lo, box.hi);
    if (idx.size() < 2)
        throw std::invalid_argument("collect_diff_stats: fewer than 2 lattice points");
    DiffStats st;
    st.d = lat.d;
    st.spacing = lat.spacing();
    std::vector<std::vector<std::int64_t>> coords;
    coords.reserve(idx.size());
    for (auto p : idx) coords.push_back(lat.coords(p));
    std::vector<std::int64_t> diff(lat.d);
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            for (int i = 0; i < lat.d; ++i) diff[i] = coords[b][i] - coords[a][i];
            canonicalize_sign(diff);
            const double dv = f.dist_values(idx[a], idx[b]);
            auto it = st.stats.find(diff);
            if (it == st.stats.end()) {
                st.stats.emplace(diff, std::make_pair(dv, dv));
            } else {
                it->second.first = std::min(it->second.first, dv);
                it->second.second = std::max(it->second.second, dv);
            }
        }
    }
    return st;
}

Eigen::MatrixXd SeminormFit::matrix_as_eigen() const {
    const int d = cube.dim();
    Eigen::MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = matrix[static_cast<std::size_t>(i) * d + j];
    return A;
}

double SeminormFit::evaluate(const Eigen::VectorXd& v) const {
    if (form != Form::matrix)
        throw std::logic_error("SeminormFit::evaluate: matrix form required");
    return (matrix_as_eigen() * v).norm();
}

namespace {

// One directional slope variable per primitive lattice direction, each
// carrying the (scale, dmin, dmax) groups of its integer multiples.
struct LpProblem {
    struct Group {
        double scale;  // g * h * |u|_2  (real pair length)
        double dmin;
        double dmax;
    };
    std::vector<std::vector<std::int64_t>> dirs;  // primitive, canonical sign
    std::vector<double> dir_norm;                 // |u|_2
    std::vector<std::vector<Group>> groups;       // per direction
    // Subadditivity triples: c * |w| * s_w <= |u| s_u + |v| s_v.
    struct Triple {
        std::size_t w, u, v;
        double c;
    };
    std::vector<Triple> triples;
    double dev_upper = 0.0;  // max dmax; t at which the zero slope is feasible
};

LpProblem build_lp(const DiffStats& st) {
    LpProblem lp;
    std::map<std::vector<std::int64_t>, std::size_t> dir_index;
    for (const auto& [diff, mm] : st.stats) {
        std::vector<std::int64_t> u = diff;
        const std::int64_t g = vec_gcd(u);
        for (auto& x : u) x /= g;
        auto [it, fresh] = dir_index.try_emplace(u, lp.dirs.size());
        if (fresh) {
            lp.dirs.push_back(u);
            lp.dir_norm.push_back(int_norm(u));
            lp.groups.emplace_back();
        }
        const double scale = static_cast<double>(g) * st.spacing * lp.dir_norm[it->second];
        lp.groups[it->second].push_back({scale, mm.first, mm.second});
        lp.dev_upper = std::max(lp.dev_upper, mm.second);
    }
    // Representable triples w = (u +- v)/c among stored directions.
    const std::size_t nd = lp.dirs.size();
    std::vector<std::int64_t> sum(st.d);
    for (std::size_t i = 0; i < nd; ++i) {
        for (std::size_t j = i + 1; j < nd; ++j) {
            for (int sign = 0; sign < 2; ++sign) {
                bool zero = true;
                for (int a = 0; a < st.d; ++a) {
                    sum[a] = lp.dirs[i][a] + (sign ? -lp.dirs[j][a] : lp.dirs[j][a]);
                    zero = zero && sum[a] == 0;
                }
                if (zero) continue;
                std::vector<std::int64_t> w = sum;
                canonicalize_sign(w);
                const std::int64_t g = vec_gcd(w);
                for (auto& x : w) x /= g;
                auto it = dir_index.find(w);
                if (it == dir_index.end()) continue;
                if (it->second == i || it->second == j) continue;
                lp.triples.push_back({it->second, i, j, static_cast<double>(g)});
            }
        }
    }
    return lp;
}

// Greatest slope vector consistent with the pair constraints at level t and
// the subadditivity triples; feasible iff it stays above the lower bounds.
bool lp_feasible(const LpProblem& lp, double t) {
    const std::size_t nd = lp.dirs.size();
    std::vector<double> lo(nd, 0.0), hi(nd, 0.0);
    for (std::size_t u = 0; u < nd; ++u) {
        double l = 0.0, h = std::numeric_limits<double>::infinity();
        for (const auto& g : lp.groups[u]) {
            l = std::max(l, (g.dmax - t) / g.scale);
            h = std::min(h, (g.dmin + t) / g.scale);
        }
        if (l > h + 1e-15) return false;
        lo[u] = l;
        hi[u] = h;
    }
    std::vector<double> s = hi;
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool changed = false;
        for (const auto& tr : lp.triples) {
            const double ub = (lp.dir_norm[tr.u] * s[tr.u] + lp.dir_norm[tr.v] * s[tr.v]) /
                              (tr.c * lp.dir_norm[tr.w]);
            if (ub < s[tr.w] - 1e-16) {
                s[tr.w] = ub;
                if (ub < lo[tr.w] - 1e-15) return false;  // only decreases from here
                changed = true;
            }
        }
        if (!changed) break;
    }
    for (std::size_t u = 0; u < nd; ++u)
        if (s[u] < lo[u] - 1e-12) return false;
    return true;
}

std::vector<double> lp_slopes_at(const LpProblem& lp, double t) {
    const std::size_t nd = lp.dirs.size();
    std::vector<double> s(nd);
    for (std::size_t u = 0; u < nd; ++u) {
        double h = std::numeric_limits<double>::infinity();
        for (const auto& g : lp.groups[u]) h = std::min(h, (g.dmin + t) / g.scale);
        s[u] = std::max(0.0, h);
    }
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool changed = false;
        for (const auto& tr : lp.triples) {
            const double ub = (lp.dir_norm[tr.u] * s[tr.u] + lp.dir_norm[tr.v] * s[tr.v]) /
                              (tr.c * lp.dir_norm[tr.w]);
            if (ub < s[tr.w] - 1e-16) {
                s[tr.w] = ub;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return s;
}

}  // namespace

SeminormFit md_fit_lp(const GridMap& f, const DyadicCube& cube, int c0) {
    bool clipped = false;
    const auto box = dilated_cube_box(cube, f.K, c0, &clipped);
    const auto st = collect_diff_stats(f, box);
    const auto lp = build_lp(st);

    double t_lo = 0.0, t_hi = lp.dev_upper;
    if (lp_feasible(lp, 0.0)) {
        t_hi = 0.0;
    } else {
        for (int it = 0; it < 70 && t_hi - t_lo > 1e-14 * std::max(1.0, lp.dev_upper); ++it) {
            const double mid = 0.5 * (t_lo + t_hi);
            if (lp_feasible(lp, mid)) t_hi = mid;
            else t_lo = mid;
        }
    }

    SeminormFit fit;
    fit.form = SeminormFit::Form::slopes;
    fit.cube = cube;
    fit.c0 = c0;
    fit.clipped = clipped;
    // Certified-infeasible endpoint: a lower bound for the LP optimum, hence
    // for the metric derivative on lattice data.
    fit.sup_deviation = t_lo;
    fit.md_value = t_lo / (c0 * cube.side());
    const auto slopes = lp_slopes_at(lp, t_hi);
    for (std::size_t u = 0; u < lp.dirs.size(); ++u)
        fit.slopes.emplace_back(lp.dirs[u], slopes[u]);
    return fit;
}

namespace {

// Real difference vectors with their min/max image distances, the matrix
// fit objective data.
struct MatrixObjective {
    std::vector<Eigen::VectorXd> diffs;
    std::vector<double> dmin, dmax;

    double eval(const Eigen::MatrixXd& A) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < diffs.size(); ++i) {
            const double val = (A * diffs[i]).norm();
            worst = std::max(worst, std::max(dmax[i] - val, val - dmin[i]));
        }
        return worst;
    }
};

MatrixObjective matrix_objective(const DiffStats& st) {
    MatrixObjective obj;
    for (const auto& [diff, mm] : st.stats) {
        Eigen::VectorXd v(st.d);
        for (int i = 0; i < st.d; ++i)
            v(i) = static_cast<double>(diff[i]) * st.spacing;
        obj.diffs.push_back(std::move(v));
        obj.dmin.push_back(mm.first);
        obj.dmax.push_back(mm.second);
    }
    return obj;
}

Eigen::MatrixXd random_rotation(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double th = angle(rng);
            Eigen::MatrixXd g = Eigen::MatrixXd::Identity(d, d);
            g(i, i) = std::cos(th);
            g(j, j) = std::cos(th);
            g(i, j) = -std::sin(th);
            g(j, i) = std::sin(th);
            r = r * g;
        }
    return r;
}

double coordinate_descent(const MatrixObjective& obj, Eigen::MatrixXd& A) {
    const int d = static_cast<int>(A.rows());
    double best = obj.eval(A);
    double step = std::max(0.25, 0.25 * A.cwiseAbs().maxCoeff());
    while (step > 1e-9) {
        bool improved = false;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                for (double sg : {1.0, -1.0}) {
                    A(i, j) += sg * step;
                    const double v = obj.eval(A);
                    if (v < best - 1e-15) {
                        best = v;
                        improved = true;
                    } else {
                        A(i, j) -= sg * step;
                    }
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

}  // namespace

SeminormFit md_fit_matrix(const GridMap& f, const DyadicCube& cube, int restarts,
                          int c0, std::uint64_t seed) {
    bool clipped = false;
    const auto box = dilated_cube_box(cube, f.K, c0, &clipped);
    const auto st = collect_diff_stats(f, box);
    const auto obj = matrix_objective(st);
    const int d = st.d;

    // LP slopes along the coordinate axes seed the diagonal start.
    const auto lp_fit = md_fit_lp(f, cube, c0);
    Eigen::MatrixXd diag0 = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [dir, slope] : lp_fit.slopes) {
        int axis = -1, nonzero = 0;
        for (int i = 0; i < d; ++i)
            if (dir[i] != 0) {
                ++nonzero;
                axis = i;
            }
        if (nonzero == 1 && (dir[axis] == 1 || dir[axis] == -1)) diag0(axis, axis) = slope;
    }

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd best_A = diag0;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        Eigen::MatrixXd A = (r == 0) ? diag0 : Eigen::MatrixXd(diag0 * random_rotation(d, rng));
        const double v = coordinate_descent(obj, A);
        if (v < best - 1e-15) {
            best = v;
            best_A = A;
        }
    }
    if (best < lp_fit.sup_deviation - 1e-9)
        throw std::logic_error("md_fit_matrix: matrix fit undercut the LP lower bound");

    SeminormFit fit;
    fit.form = SeminormFit::Form::matrix;
    fit.cube = cube;
    fit.c0 = c0;
    fit.clipped = clipped;
    fit.sup_deviation = best;
    fit.md_value = best / (c0 * cube.side());
    fit.matrix.resize(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) fit.matrix[static_cast<std::size_t>(i) * d + j] = best_A(i, j);
    return fit;
}

SvdResult svd_small(const Eigen::MatrixXd& M) {
    const int d = static_cast<int>(M.rows());
    if (M.cols() != d || d < 1 || d > 4)
        throw std::invalid_argument("svd_small: square matrix with d <= 4 required");

    Eigen::MatrixXd B = M;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(d, d);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double alpha = B.col(p).squaredNorm();
                const double beta = B.col(q).squaredNorm();
                const double gamma = B.col(p).dot(B.col(q));
                if (alpha * beta > 0.0)
                    off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
                if (gamma == 0.0) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const Eigen::VectorXd bp = B.col(p);
                B.col(p) = c * bp - s * B.col(q);
                B.col(q) = s * bp + c * B.col(q);
                const Eigen::VectorXd vp = V.col(p);
                V.col(p) = c * vp - s * V.col(q);
                V.col(q) = s * vp + c * V.col(q);
            }
        }
        if (off < 1e-15) break;
    }

    SvdResult out;
    out.S = Eigen::VectorXd(d);
    out.U = Eigen::MatrixXd::Zero(d, d);
    out.V = V;
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    Eigen::VectorXd norms(d);
    for (int i = 0; i < d; ++i) norms(i) = B.col(i).norm();
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return norms(a) > norms(b); });
    Eigen::MatrixXd Vs(d, d);
    for (int i = 0; i < d; ++i) {
        out.S(i) = norms(order[i]);
        Vs.col(i) = V.col(order[i]);
        if (out.S(i) > 1e-300) out.U.col(i) = B.col(order[i]) / out.S(i);
    }
    out.V = Vs;
    // Complete U to an orthogonal matrix where singular values vanish.
    for (int i = 0; i < d; ++i) {
        if (out.S(i) > 1e-300) continue;
        Eigen::VectorXd cand;
        double best_norm = -1.0;
        for (int e = 0; e < d; ++e) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
            v(e) = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != i && (out.S(j) > 1e-300 || j < i))
                    v -= out.U.col(j).dot(v) * out.U.col(j);
            if (v.norm() > best_norm) {
                best_norm = v.norm();
                cand = v;
            }
        }
        out.U.col(i) = cand / cand.norm();
    }
    return out;
}

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
    return out;
}

// Orthonormalize a spanning set; returns the resulting basis vectors.
std::vector<Eigen::VectorXd> gram_schmidt(const std::vector<Eigen::VectorXd>& vecs,
                                          double tol = 1e-12) {
    std::vector<Eigen::VectorXd> basis;
    for (const auto& v0 : vecs) {
        Eigen::VectorXd v = v0;
        for (const auto& b : basis) v -= b.dot(v) * b;
        if (v.norm() > tol) basis.push_back(v / v.norm());
    }
    return basis;
}

}  // namespace

SymmetricPolytope polytope_from_vertices(const std::vector<std::vector<double>>& vertices) {
    if (vertices.empty())
        throw std::invalid_argument("polytope_from_vertices: no vertices");
    const int d = static_cast<int>(vertices[0].size());
    std::vector<Eigen::VectorXd> vs;
    for (const auto& v : vertices) {
        if (static_cast<int>(v.size()) != d)
            throw std::invalid_argument("polytope_from_vertices: inconsistent dimension");
        vs.push_back(to_eigen(v));
        vs.push_back(-to_eigen(v));  // symmetric closure
    }
    const auto basis = gram_schmidt(vs);
    const int k = static_cast<int>(basis.size());
    if (k == 0) throw std::invalid_argument("polytope_from_vertices: degenerate vertex set");
    if (k > 2)
        throw std::invalid_argument(
            "polytope_from_vertices: vertex form supported for dim(V) <= 2; "
            "supply the inequality description instead");

    SymmetricPolytope poly;
    poly.ambient_dim = d;
    for (const auto& b : basis) {
        std::vector<double> bb(d);
        for (int i = 0; i < d; ++i) bb[static_cast<std::size_t>(i)] = b(i);
        poly.subspace.push_back(bb);
    }

    if (k == 1) {
        double bmax = 0.0;
        for (const auto& v : vs) bmax = std::max(bmax, std::abs(basis[0].dot(v)));
        std::vector<double> nrm(d);
        for (int i = 0; i < d; ++i) nrm[static_cast<std::size_t>(i)] = basis[0](i);
        poly.normals.push_back(nrm);
        poly.offsets.push_back(bmax);
        return poly;
    }

    // Planar convex hull (monotone chain) of the symmetric vertex set in
    // V coordinates, then one half-space per hull edge.
    std::vector<std::pair<double, double>> pts;
    for (const auto& v : vs) pts.emplace_back(basis[0].dot(v), basis[1].dot(v));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                    const std::pair<double, double>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> lower, upper;
    for (const auto& p : pts) {
        while (lower.size() >= 2 && cross(lower[lower.size() - 2], lower.back(), p) <= 0)
            lower.pop_back();
        lower.push_back(p);
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (upper.size() >= 2 && cross(upper[upper.size() - 2], upper.back(), *it) <= 0)
            upper.pop_back();
        upper.push_back(*it);
    }
    std::vector<std::pair<double, double>> hull(lower.begin(), lower.end() - 1);
    hull.insert(hull.end(), upper.begin(), upper.end() - 1);
    if (hull.size() < 3)
        throw std::invalid_argument("polytope_from_vertices: hull degenerate in the plane");

    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& p = hull[i];
        const auto& q = hull[(i + 1) % hull.size()];
        double nx = q.second - p.second;
        double ny = -(q.first - p.first);
        const double len = std::hypot(nx, ny);
        nx /= len;
        ny /= len;
        double off = nx * p.first + ny * p.second;
        if (off < 0) {
            nx = -nx;
            ny = -ny;
            off = -off;
        }
        std::vector<double> nrm(d);
        for (int a = 0; a < d; ++a)
            nrm[static_cast<std::size_t>(a)] = nx * basis[0](a) + ny * basis[1](a);
        poly.normals.push_back(nrm);
        poly.offsets.push_back(off);
    }
    return poly;
}

JohnResult john_matrix(const SymmetricPolytope& poly) {
    if (poly.normals.empty())
        throw std::invalid_argument("john_matrix: no inequalities");
    const int d = poly.ambient_dim > 0 ? poly.ambient_dim
                                       : static_cast<int>(poly.normals[0].size());

    std::vector<Eigen::VectorXd> basis;
    if (poly.subspace.empty()) {
        for (int i = 0; i < d; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
            e(i) = 1.0;
            basis.push_back(e);
        }
    } else {
        for (const auto& b : poly.subspace) basis.push_back(to_eigen(b));
        if (gram_schmidt(basis).size() != basis.size())
            throw std::invalid_argument("john_matrix: subspace basis not independent");
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = i; j < basis.size(); ++j) {
                const double want = (i == j) ? 1.0 : 0.0;
                if (std::abs(basis[i].dot(basis[j]) - want) > 1e-9)
                    throw std::invalid_argument("john_matrix: subspace basis not orthonormal");
            }
    }
    const int k = static_cast<int>(basis.size());
    if (k > 3) throw std::invalid_argument("john_matrix: dim V <= 3 required");

    // Express normals in V coordinates; they must lie in V and span it.
    Eigen::MatrixXd an(static_cast<int>(poly.normals.size()), k);
    Eigen::VectorXd b(static_cast<int>(poly.normals.size()));
    for (std::size_t j = 0; j < poly.normals.size(); ++j) {
        if (!(poly.offsets[j] > 0.0))
            throw std::invalid_argument("john_matrix: offsets must be positive");
        Eigen::VectorXd a = to_eigen(poly.normals[j]);
        Eigen::VectorXd coords(k);
        Eigen::VectorXd recon = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < k; ++i) {
            coords(i) = basis[static_cast<std::size_t>(i)].dot(a);
            recon += coords(i) * basis[static_cast<std::size_t>(i)];
        }
        if ((a - recon).norm() > 1e-9 * std::max(1.0, a.norm()))
            throw std::invalid_argument("john_matrix: normal not inside the subspace");
        an.row(static_cast<int>(j)) = coords.transpose();
        b(static_cast<int>(j)) = poly.offsets[j];
    }
    {
        std::vector<Eigen::VectorXd> rows;
        for (int j = 0; j < an.rows(); ++j) rows.push_back(an.row(j).transpose());
        if (static_cast<int>(gram_schmidt(rows).size()) != k)
            throw std::invalid_argument("john_matrix: polytope unbounded in V");
    }

    // Max-volume inscribed ellipsoid E = {L y : |y| <= 1}: maximize det L
    // under ||L^T a_j|| <= b_j, by coordinate ascent with feasibility
    // rescaling. The problem is convex; the symmetric test bodies stay at
    // their symmetric optimum.
    auto worst_ratio = [&](const Eigen::MatrixXd& L) {
        double w = 0.0;
        for (int j = 0; j < an.rows(); ++j)
            w = std::max(w, (L.transpose() * an.row(j).transpose()).norm() / b(j));
        return w;
    };
    double r0 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < an.rows(); ++j)
        r0 = std::min(r0, b(j) / an.row(j).norm());
    Eigen::MatrixXd L = r0 * Eigen::MatrixXd::Identity(k, k);
    double best_det = L.determinant();
    double step = 0.25 * r0;
    while (step > 1e-12 * r0) {
        bool improved = false;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j <= i; ++j) {
                for (double sg : {1.0, -1.0}) {
                    Eigen::MatrixXd trial = L;
                    trial(i, j) += sg * step;
                    const double rho = worst_ratio(trial);
                    if (rho > 0.0) trial /= rho;  // slide back onto the boundary
                    const double det = trial.determinant();
                    if (det > best_det * (1.0 + 1e-14)) {
                        L = trial;
                        best_det = det;
                        improved = true;
                    }
                }
            }
        }
        if (!improved) step *= 0.5;
    }

    Eigen::MatrixXd T = L.inverse();
    Eigen::MatrixXd P(d, k);
    for (int i = 0; i < k; ++i) P.col(i) = basis[static_cast<std::size_t>(i)];
    JohnResult res;
    res.A = P * T * P.transpose();
    res.dim_v = k;
    res.factor = static_cast<double>(k);

    // Sampled guarantee check: gauge(w) <= |Aw| <= k * gauge(w) on V.
    std::mt19937_64 rng(0x10aeULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int it = 0; it < 1000; ++it) {
        Eigen::VectorXd y(k);
        for (int i = 0; i < k; ++i) y(i) = gauss(rng);
        if (y.norm() < 1e-12) continue;
        y /= y.norm();
        const Eigen::VectorXd w = P * y;
        double gauge = 0.0;
        for (int j = 0; j < an.rows(); ++j)
            gauge = std::max(gauge, std::abs(an.row(j).dot(y)) / b(j));
        const double aw = (res.A * w).norm();
        if (aw + 1e-9 < gauge || aw > res.factor * gauge + 1e-9)
            throw std::logic_error("john_matrix: sampled factor guarantee failed");
    }
    return res;
}

double restricted_sigma_min(const Eigen::MatrixXd& A,
                            const std::vector<Eigen::VectorXd>& plane) {
    const int d = static_cast<int>(A.rows());
    const int n = static_cast<int>(plane.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) M.col(i) = A * plane[static_cast<std::size_t>(i)];
    const auto svd = svd_small(M);
    return svd.S(n - 1);
}

AdaptedBasis adapted_basis(const SeminormFit& fit,
                           const std::vector<Eigen::VectorXd>& plane, double delta,
                           std::uint64_t seed) {
    if (fit.form != SeminormFit::Form::matrix)
        throw std::invalid_argument("adapted_basis: matrix-form fit required");
    const Eigen::MatrixXd A = fit.matrix_as_eigen();
    const int d = static_cast<int>(A.rows());
    const int n = static_cast<int>(plane.size());
    if (n < 1 || n > d) throw std::invalid_argument("adapted_basis: bad plane dimension");
    if (!(delta > 0.0)) throw std::invalid_argument("adapted_basis: delta must be positive");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_plane_unit = [&]() {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        for (const auto& p : plane) v += gauss(rng) * p;
        const double nn = v.norm();
        return (nn > 1e-12) ? Eigen::VectorXd(v / nn) : plane[0];
    };
    for (int it = 0; it < 200; ++it) {
        const Eigen::VectorXd v = random_plane_unit();
        if ((A * v).norm() < delta - 1e-9) {
            std::string msg = "adapted_basis: precondition ||v|| >= delta|v| fails at v = (";
            for (int i = 0; i < d; ++i)
                msg += std::to_string(v(i)) + (i + 1 < d ? "," : ")");
            throw std::invalid_argument(msg);
        }
    }

    const auto svd = svd_small(A);
    const double sigma_n = svd.S(n - 1);
    if (sigma_n < delta / d)
        throw std::invalid_argument(
            "adapted_basis: sigma_n below delta/d; seminorm inconsistent with plane claim");

    AdaptedBasis out;
    out.n = n;
    out.delta = delta;
    out.constant = sigma_n / (std::sqrt(static_cast<double>(n)) * delta);
    for (int i = 0; i < d; ++i) out.vectors.push_back(svd.V.col(i));

    // Guarantee check on random coefficient vectors (the returned constant,
    // not the implicit one).
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int it = 0; it < 1000; ++it) {
        Eigen::VectorXd a(d);
        for (int i = 0; i < d; ++i) a(i) = unif(rng);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < d; ++i) x += a(i) * out.vectors[static_cast<std::size_t>(i)];
        double sum_n = 0.0;
        for (int i = 0; i < n; ++i) sum_n += std::abs(a(i));
        if ((A * x).norm() < out.constant * delta * sum_n - 1e-9)
            throw std::logic_error("adapted_basis: verification of the guarantee failed");
    }
    return out;
}

namespace {

void for_each_cube_at_level(int d, int level, const std::function<bool(const DyadicCube&)>& fn) {
    const std::int64_t cells = std::int64_t{1} << level;
    std::vector<std::int64_t> c(d, 0);
    while (true) {
        if (fn(DyadicCube(level, c))) return;
        int i = d - 1;
        for (; i >= 0; --i) {
            if (++c[i] < cells) break;
            c[i] = 0;
        }
        if (i < 0) return;
    }
}

std::vector<std::vector<Eigen::VectorXd>> coordinate_planes(int d, int n) {
    std::vector<std::vector<Eigen::VectorXd>> out;
    std::vector<int> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        std::vector<Eigen::VectorXd> plane;
        for (int i : pick) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
            e(i) = 1.0;
            plane.push_back(e);
        }
        out.push_back(std::move(plane));
        int i = n - 1;
        while (i >= 0 && pick[i] == d - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return out;
}

}  // namespace

std::optional<GoodCubeWitness> good_cube_search(const GridMap& f, double eta, double c,
                                                double min_side) {
    if (!(eta > 0.0) || !(c > 0.0))
        throw std::invalid_argument("good_cube_search: eta and c must be positive");
    if (min_side < std::ldexp(1.0, -f.K + 1) - 1e-15)
        throw std::invalid_argument("good_cube_search: min_side below 2^(1-K)");
    const int d = f.dim();
    const int n = f.n;
    std::optional<GoodCubeWitness> found;

    for (int level = 0; level <= f.K && std::ldexp(1.0, -level) >= min_side - 1e-15; ++level) {
        for_each_cube_at_level(d, level, [&](const DyadicCube& q) {
            auto lp = md_fit_lp(f, q, /*c0=*/3);
            if (!(lp.md_value < eta)) return false;
            auto mat = md_fit_matrix(f, q, /*restarts=*/2, /*c0=*/3);
            const Eigen::MatrixXd A = mat.matrix_as_eigen();
            const auto svd = svd_small(A);

            std::vector<std::vector<Eigen::VectorXd>> planes;
            {
                std::vector<Eigen::VectorXd> top;
                for (int i = 0; i < n; ++i) top.push_back(svd.V.col(i));
                planes.push_back(std::move(top));
            }
            for (auto& p : coordinate_planes(d, n)) planes.push_back(std::move(p));

            double best_c = -1.0;
            std::size_t best_idx = 0;
            for (std::size_t i = 0; i < planes.size(); ++i) {
                const double ci = restricted_sigma_min(A, planes[i]);
                if (ci > best_c + 1e-15) {
                    best_c = ci;
                    best_idx = i;
                }
            }
            if (best_c < c) return false;

            GoodCubeWitness w;
            w.cube = q;
            w.fit = std::move(lp);
            w.matrix = std::move(mat);
            w.plane = planes[best_idx];
            w.c = best_c;
            w.eta = eta;
            w.clipped = w.fit.clipped;
            found = std::move(w);
            return true;  // first witness in scan order
        });
        if (found) break;
    }
    return found;
}

PositiveContentCertificate positive_content_certificate(const GridMap& f,
                                                        const GoodCubeWitness& w) {
    // Replay the witness claims against this map; a changed map fails here.
    const auto lp = md_fit_lp(f, w.cube, w.fit.c0);
    if (std::abs(lp.md_value - w.fit.md_value) > 1e-9 || !(w.fit.md_value < w.eta))
        throw std::invalid_argument(
            "positive_content_certificate: witness stale (md gate mismatch)");
    bool clipped = false;
    const auto box = dilated_cube_box(w.cube, f.K, w.matrix.c0, &clipped);
    const auto st = collect_diff_stats(f, box);
    const auto obj = matrix_objective(st);
    const Eigen::MatrixXd A = w.matrix.matrix_as_eigen();
    if (std::abs(obj.eval(A) - w.matrix.sup_deviation) > 1e-9)
        throw std::invalid_argument(
            "positive_content_certificate: witness stale (seminorm deviation mismatch)");
    if (std::abs(restricted_sigma_min(A, w.plane) - w.c) > 1e-9)
        throw std::invalid_argument(
            "positive_content_certificate: witness stale (plane constant mismatch)");

    PositiveContentCertificate cert;
    cert.witness = w;
    cert.basis = adapted_basis(w.matrix, w.plane, w.c);

    std::vector<std::vector<double>> basis_rows;
    for (const auto& v : cert.basis.vectors) {
        std::vector<double> row(v.size());
        for (int i = 0; i < v.size(); ++i) row[static_cast<std::size_t>(i)] = v(i);
        basis_rows.push_back(std::move(row));
    }
    cert.q_prime = inscribe_rotated_cube(w.cube, basis_rows);

    const auto lat = f.lattice();
    const int d = f.dim();
    const double h = lat.spacing();
    const std::int64_t top = std::int64_t{1} << f.K;
    cert.face_grid = std::max(2, static_cast<int>(w.cube.span_at(f.K)));

    auto nearest_lattice = [&](const std::vector<double>& x) {
        std::vector<std::int64_t> cc(d);
        for (int i = 0; i < d; ++i) {
            const double t = std::round(x[static_cast<std::size_t>(i)] / h);
            cc[static_cast<std::size_t>(i)] =
                std::min<std::int64_t>(top, std::max<std::int64_t>(0, static_cast<std::int64_t>(t)));
        }
        return lat.index(cc);
    };
    auto face_set = [&](int axis, bool high) {
        std::vector<std::int64_t> idx;
        for (const auto& x : rotated_face_samples(cert.q_prime, axis, high, cert.face_grid))
            idx.push_back(nearest_lattice(x));
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        return idx;
    };

    double a = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < f.n; ++axis) {
        const auto lo = face_set(axis, false);
        const auto hi = face_set(axis, true);
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::int64_t, std::int64_t> wit{-1, -1};
        for (auto p : lo)
            for (auto q : hi) {
                const double dv = f.dist_values(p, q);
                if (dv < best) {
                    best = dv;
                    wit = {p, q};
                }
            }
        cert.face_distances.push_back(best);
        cert.face_witnesses.push_back(wit);
        a = std::min(a, best / cert.q_prime.side);
    }
    cert.a = a;
    cert.bound_hhat = pow_int(a, f.n) * pow_int(cert.q_prime.side, d);
    cert.bound_h = cert.bound_hhat / std::pow(static_cast<double>(d), 0.5 * f.m);
    // Each continuum face point sits within a face-grid cell of a sample,
    // which is then rounded to the lattice; both moves cost Lipschitz error.
    const double face_cell = 0.5 * std::sqrt(static_cast<double>(std::max(1, d - 1))) *
                             cert.q_prime.side / cert.face_grid;
    const double rounding = 0.5 * std::sqrt(static_cast<double>(d)) * h;
    cert.sampling_error = 2.0 * f.declared_lip * (face_cell + rounding);
    cert.degenerate = !(cert.a > 0.0);
    if (cert.degenerate) {
        cert.bound_hhat = 0.0;
        cert.bound_h = 0.0;
    }
    return cert;
}

double quantdiff_sum(const GridMap& f, double eps, int c0) {
    if (!(eps > 0.0)) throw std::invalid_argument("quantdiff_sum: eps must be positive");
    const int d = f.dim();
    double sum = 0.0;
    for (int level = 0; level <= f.K - 2; ++level) {
        const double measure = pow_int(std::ldexp(1.0, -level), d);
        for_each_cube_at_level(d, level, [&](const DyadicCube& q) {
            const auto fit = md_fit_lp(f, q, c0);
            if (fit.md_value > eps) sum += measure;
            return false;
        });
    }
    return sum;
}

}  // namespace contentlab
