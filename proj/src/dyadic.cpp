#include "contentlab/dyadic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace contentlab {

DyadicCube::DyadicCube(int level_, std::vector<std::int64_t> corner_)
    : level(level_), corner(std::move(corner_)) {
    if (level < 0 || level > kMaxLevel)
        throw std::invalid_argument("DyadicCube: level out of range");
    const std::int64_t cells = std::int64_t{1} << level;
    for (auto c : corner)
        if (c < 0 || c >= cells)
            throw std::invalid_argument("DyadicCube: corner outside Q_0");
}

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

std::vector<double> DyadicCube::center() const {
    std::vector<double> c(corner.size());
    const double s = side();
    for (std::size_t i = 0; i < corner.size(); ++i)
        c[i] = (static_cast<double>(corner[i]) + 0.5) * s;
    return c;
}

std::int64_t DyadicCube::span_at(int K) const {
    if (K < level) throw std::invalid_argument("span_at: K < level");
    return std::int64_t{1} << (K - level);
}

std::vector<std::int64_t> DyadicCube::corner_at(int K) const {
    const std::int64_t s = span_at(K);
    std::vector<std::int64_t> out(corner.size());
    for (std::size_t i = 0; i < corner.size(); ++i) out[i] = corner[i] * s;
    return out;
}

std::string DyadicCube::describe() const {
    std::ostringstream os;
    os << "Q(level=" << level << ", corner=[";
    for (std::size_t i = 0; i < corner.size(); ++i)
        os << corner[i] << (i + 1 < corner.size() ? "," : "");
    os << "])";
    return os.str();
}

DyadicCube root_cube(int d) {
    return DyadicCube(0, std::vector<std::int64_t>(d, 0));
}

std::vector<DyadicCube> children(const DyadicCube& cube) {
    if (cube.level >= kMaxLevel)
        throw std::invalid_argument("children: refusing to subdivide past level " +
                                    std::to_string(kMaxLevel) + " at " + cube.describe());
    const int d = cube.dim();
    std::vector<DyadicCube> out;
    out.reserve(std::size_t{1} << d);
    for (std::int64_t mask = 0; mask < (std::int64_t{1} << d); ++mask) {
        std::vector<std::int64_t> c(d);
        for (int i = 0; i < d; ++i)
            c[i] = 2 * cube.corner[i] + ((mask >> i) & 1);
        out.emplace_back(cube.level + 1, std::move(c));
    }
    return out;
}

std::vector<std::vector<std::int64_t>> face_lattice_points(const Face& face, int K) {
    const DyadicCube& q = face.cube;
    if (K < q.level)
        throw std::invalid_argument("face_lattice_points: K < cube level");
    if (face.axis < 0 || face.axis >= q.dim())
        throw std::invalid_argument("face_lattice_points: axis out of range");
    const int d = q.dim();
    const std::int64_t span = q.span_at(K);
    const auto base = q.corner_at(K);
    const std::int64_t fixed = base[face.axis] + (face.high ? span : 0);

    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> p(d);
    p[face.axis] = fixed;
    // Odometer over the d-1 free axes.
    std::vector<std::int64_t> t(d > 0 ? d - 1 : 0, 0);
    const std::size_t free_axes = t.size();
    while (true) {
        int j = 0;
        for (int i = 0; i < d; ++i) {
            if (i == face.axis) continue;
            p[i] = base[i] + t[j++];
        }
        out.push_back(p);
        std::size_t a = 0;
        for (; a < free_axes; ++a) {
            if (++t[a] <= span) break;
            t[a] = 0;
        }
        if (a == free_axes) break;
    }
    return out;
}

bool basis_orthonormal(const std::vector<std::vector<double>>& basis, double tol) {
    const std::size_t d = basis.size();
    for (const auto& v : basis)
        if (v.size() != d) return false;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double dot = 0.0;
            for (std::size_t a = 0; a < d; ++a) dot += basis[i][a] * basis[j][a];
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - want) > tol) return false;
        }
    }
    return true;
}

RotatedCube inscribe_rotated_cube(const DyadicCube& cube,
                                  const std::vector<std::vector<double>>& basis) {
    const int d = cube.dim();
    if (static_cast<int>(basis.size()) != d)
        throw std::invalid_argument("inscribe_rotated_cube: basis size != dim");
    if (!basis_orthonormal(basis, 1e-9))
        throw std::invalid_argument("inscribe_rotated_cube: basis not orthonormal");
    RotatedCube rc;
    rc.center = cube.center();
    rc.basis = basis;
    rc.side = cube.side() / std::sqrt(static_cast<double>(d));
    return rc;
}

std::vector<std::vector<double>> rotated_cube_vertices(const RotatedCube& rc) {
    const int d = static_cast<int>(rc.center.size());
    std::vector<std::vector<double>> out;
    out.reserve(std::size_t{1} << d);
    for (std::int64_t mask = 0; mask < (std::int64_t{1} << d); ++mask) {
        std::vector<double> v = rc.center;
        for (int i = 0; i < d; ++i) {
            const double sg = ((mask >> i) & 1) ? 0.5 : -0.5;
            for (int a = 0; a < d; ++a) v[a] += sg * rc.side * rc.basis[i][a];
        }
        out.push_back(std::move(v));
    }
    return out;
}

bool rotated_cube_inside(const RotatedCube& rc, const DyadicCube& ambient, double tol) {
    const double s = ambient.side();
    const int d = ambient.dim();
    for (const auto& v : rotated_cube_vertices(rc)) {
        for (int i = 0; i < d; ++i) {
            const double lo = static_cast<double>(ambient.corner[i]) * s;
            if (v[i] < lo - tol || v[i] > lo + s + tol) return false;
        }
    }
    return true;
}

std::vector<std::vector<double>> rotated_face_samples(const RotatedCube& rc,
                                                      int axis, bool high, int grid) {
    const int d = static_cast<int>(rc.center.size());
    if (axis < 0 || axis >= d)
        throw std::invalid_argument("rotated_face_samples: axis out of range");
    if (grid < 1) throw std::invalid_argument("rotated_face_samples: grid < 1");
    const double half = 0.5 * rc.side;

    std::vector<std::vector<double>> out;
    std::vector<int> t(d > 1 ? d - 1 : 0, 0);
    const std::size_t free_axes = t.size();
    while (true) {
        std::vector<double> v = rc.center;
        const double sa = high ? half : -half;
        for (int a = 0; a < d; ++a) v[a] += sa * rc.basis[axis][a];
        int j = 0;
        for (int i = 0; i < d; ++i) {
            if (i == axis) continue;
            const double ti = -half + rc.side * static_cast<double>(t[j++]) / grid;
            for (int a = 0; a < d; ++a) v[a] += ti * rc.basis[i][a];
        }
        out.push_back(std::move(v));
        std::size_t a = 0;
        for (; a < free_axes; ++a) {
            if (++t[a] <= grid) break;
            t[a] = 0;
        }
        if (a == free_axes) break;
    }
    return out;
}

}  // namespace contentlab
