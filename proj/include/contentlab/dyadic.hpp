#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace contentlab {

// Deepest subdivision level accepted before children() refuses. Units of
// 2^-level stay comfortably inside int64 range well past this, but lattice
// sizes explode much earlier; 30 is a generous cap.
inline constexpr int kMaxLevel = 30;

/// Dyadic cube inside Q_0 = [0,1]^d: level k and integer corner in units of
/// 2^-k, i.e. the cube prod_i [corner_i * 2^-k, (corner_i + 1) * 2^-k].
struct DyadicCube {
    int level = 0;
    std::vector<std::int64_t> corner;  // size d, each in [0, 2^level)

    DyadicCube() = default;
    DyadicCube(int level_, std::vector<std::int64_t> corner_);

    int dim() const { return static_cast<int>(corner.size()); }
    double side() const;
    std::vector<double> center() const;

    /// Lattice units of one cube side at resolution K (K >= level).
    std::int64_t span_at(int K) const;
    /// Corner in lattice units at resolution K.
    std::vector<std::int64_t> corner_at(int K) const;

    bool operator==(const DyadicCube& o) const = default;
    std::string describe() const;
};

/// Root cube [0,1]^d.
DyadicCube root_cube(int d);

/// The 2^d children of level+1 partitioning the cube. Throws on level overflow.
std::vector<DyadicCube> children(const DyadicCube& cube);

/// One of the two faces of a cube orthogonal to `axis`; `high` selects the
/// face at the larger coordinate. (axis, low) and (axis, high) form a pair
/// of opposite faces.
struct Face {
    DyadicCube cube;
    int axis = 0;
    bool high = false;
};

/// All lattice points of spacing 2^-K lying on the face, as integer
/// coordinate vectors in units of 2^-K. Count is (2^(K-level)+1)^(d-1).
/// Requires K >= cube.level.
std::vector<std::vector<std::int64_t>> face_lattice_points(const Face& face, int K);

/// Cube with arbitrary orientation: center, orthonormal axis directions, side.
struct RotatedCube {
    std::vector<double> center;
    std::vector<std::vector<double>> basis;  // d orthonormal vectors
    double side = 0.0;
};

/// Largest rotated cube guaranteed inscribed for *every* orientation:
/// centered at the cube center with side = side(Q)/sqrt(d). Vertices land
/// inside the closed ambient cube for any orthonormal basis. Throws if the
/// basis is not orthonormal within 1e-9.
RotatedCube inscribe_rotated_cube(const DyadicCube& cube,
                                  const std::vector<std::vector<double>>& basis);

/// The 2^d vertices center + (side/2) * sum_i (+-1) basis_i.
std::vector<std::vector<double>> rotated_cube_vertices(const RotatedCube& rc);

/// Max-norm check that all vertices lie in the closed ambient cube (slack for
/// floating point roundoff).
bool rotated_cube_inside(const RotatedCube& rc, const DyadicCube& ambient,
                         double tol = 1e-9);

/// Points of a face of the rotated cube orthogonal to basis[axis], sampled on
/// a (grid+1)^(d-1) grid of in-face coordinates.
std::vector<std::vector<double>> rotated_face_samples(const RotatedCube& rc,
                                                      int axis, bool high,
                                                      int grid);

bool basis_orthonormal(const std::vector<std::vector<double>>& basis, double tol);

}  // namespace contentlab
