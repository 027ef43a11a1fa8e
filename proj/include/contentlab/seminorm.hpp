#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contentlab/content.hpp"
#include "contentlab/dyadic.hpp"
#include "contentlab/metric.hpp"

namespace contentlab {

/// Closed axis box in lattice units at resolution K.
struct LatticeBox {
    std::vector<std::int64_t> lo;
    std::vector<std::int64_t> hi;
};

/// Box of the c0-dilation of a dyadic cube (c0 in {1,3}), clipped to Q_0.
/// Sets `clipped` when the dilation ran past the boundary.
LatticeBox dilated_cube_box(const DyadicCube& cube, int K, int c0, bool* clipped = nullptr);

/// Min/max observed image distance per canonical integer difference vector
/// of lattice pairs in a box. Shared input of both seminorm fitters.
struct DiffStats {
    int d = 0;
    double spacing = 0.0;  // 2^-K
    // canonical diff (first nonzero positive) -> (dmin, dmax)
    std::map<std::vector<std::int64_t>, std::pair<double, double>> stats;
};

DiffStats collect_diff_stats(const GridMap& f, const LatticeBox& box);

/// Best seminorm approximation of the pulled-back metric on a cube, either
/// as directional slopes (LP relaxation, a certified lower bound for the
/// metric derivative on lattice data) or as a matrix seminorm |Av| (an upper
/// bound within the matrix family).
struct SeminormFit {
    enum class Form { slopes, matrix };
    Form form = Form::slopes;
    // Primitive lattice direction -> seminorm value per unit Euclidean length.
    std::vector<std::pair<std::vector<std::int64_t>, double>> slopes;
    std::vector<double> matrix;  // row-major d x d when form == matrix
    double md_value = 0.0;       // sup deviation / (c0 * side(cube))
    double sup_deviation = 0.0;  // unnormalized
    DyadicCube cube;
    int c0 = 1;
    bool clipped = false;

    Eigen::MatrixXd matrix_as_eigen() const;
    /// Seminorm value of a real vector (matrix form only).
    double evaluate(const Eigen::VectorXd& v) const;
};

/// Linear program over directional slopes: minimize the sup deviation t
/// subject to |d(f(x),f(y)) - s_u |x-y|| <= t per pair group and
/// subadditivity over representable direction triples. Solved by bisection
/// on t with a monotone feasibility closure; the reported value is the
/// certified-infeasible lower endpoint, hence a lower bound.
SeminormFit md_fit_lp(const GridMap& f, const DyadicCube& cube, int c0 = 1);

/// Derivative-free coordinate descent over d x d matrices A minimizing the
/// sup deviation of |A(x-y)|, restarted from the LP-slope diagonal and
/// seeded orthogonal twists. Deterministic for fixed seed.
SeminormFit md_fit_matrix(const GridMap& f, const DyadicCube& cube, int restarts = 3,
                          int c0 = 1, std::uint64_t seed = 0x5eed5eedULL);

/// Small dense SVD via one-sided Jacobi. M = U * diag(S) * V^T with singular
/// values sorted descending, for d <= 4.
struct SvdResult {
    Eigen::MatrixXd U;
    Eigen::VectorXd S;
    Eigen::MatrixXd V;
};
SvdResult svd_small(const Eigen::MatrixXd& M);

/// Symmetric convex polytope K = {x in V : |normals_j . x| <= offsets_j},
/// the unit ball of a norm on the subspace V (orthonormal `subspace` basis;
/// empty means the full ambient space).
struct SymmetricPolytope {
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    std::vector<std::vector<double>> subspace;
    int ambient_dim = 0;
};

/// H-description from the symmetric vertex set (dim V <= 2; higher dims must
/// supply inequalities directly).
SymmetricPolytope polytope_from_vertices(const std::vector<std::vector<double>>& vertices);

/// Maximal-volume inscribed ellipsoid composed with the orthogonal projection
/// onto V: returns A with gauge(w) <= |Aw| <= dimV * gauge(w), verified on
/// sampled directions (throws if the sampled guarantee fails).
struct JohnResult {
    Eigen::MatrixXd A;  // ambient_dim x ambient_dim
    int dim_v = 0;
    double factor = 0.0;  // dim_v, the guaranteed upper constant
};
JohnResult john_matrix(const SymmetricPolytope& poly);

/// Orthonormal basis adapted to a matrix seminorm: right singular vectors,
/// with the guarantee ||sum a_i v_i|| >= constant * delta * sum_{i<=n} |a_i|
/// verified on random coefficient vectors at construction.
struct AdaptedBasis {
    std::vector<Eigen::VectorXd> vectors;
    double delta = 0.0;
    double constant = 0.0;  // c0 with ||.|| >= c0 * delta * sum_{i<=n}|a_i|
    int n = 0;
};
AdaptedBasis adapted_basis(const SeminormFit& fit,
                           const std::vector<Eigen::VectorXd>& plane, double delta,
                           std::uint64_t seed = 0xada9ULL);

/// Smallest singular value of A restricted to the span of the given
/// orthonormal vectors (exact, via svd_small of the restricted matrix).
double restricted_sigma_min(const Eigen::MatrixXd& A,
                            const std::vector<Eigen::VectorXd>& plane);

/// A cube witnessing eta-flatness of the map together with an n-plane on
/// which the fitted seminorm is c-nondegenerate. The flatness gate is the LP
/// fit (slope seminorms represent sup-metric pullbacks exactly; Euclidean
/// matrix norms only do so up to a dimensional factor); the matrix fit
/// supplies the singular directions that orient the plane and the certificate
/// cube.
struct GoodCubeWitness {
    DyadicCube cube;
    SeminormFit fit;     // slopes form, md_value < eta
    SeminormFit matrix;  // matrix form on the same region
    std::vector<Eigen::VectorXd> plane;  // n orthonormal vectors
    double c = 0.0;        // achieved nondegeneracy constant of |Av| on the plane
    double eta = 0.0;      // requested md bound
    bool clipped = false;  // 3Q ran past Q_0
};

/// Deterministic coarse-to-fine scan (level ascending, lexicographic corner)
/// for a cube with md(3Q) < eta and an n-plane with |Av| >= c|v|. The plane
/// is the best of the top-n right-singular subspace and the coordinate
/// n-planes. Returns the first witness or nullopt.
std::optional<GoodCubeWitness> good_cube_search(const GridMap& f, double eta, double c,
                                                double min_side);

/// Lower-bound certificate from a good cube: inscribes the rotated cube
/// oriented along the adapted basis, measures face distances of f on it, and
/// returns the certified bound a^n side(Q')^(n+m) for the arbitrary-cover
/// content (and the dyadic-cover bound after division by d^(m/2)).
struct PositiveContentCertificate {
    GoodCubeWitness witness;
    AdaptedBasis basis;
    RotatedCube q_prime;
    std::vector<double> face_distances;  // k = 1..n on Q'
    std::vector<std::pair<std::int64_t, std::int64_t>> face_witnesses;  // lattice idx
    int face_grid = 0;
    double a = 0.0;             // min_k face distance / side(Q')
    double bound_hhat = 0.0;    // a^n * side(Q')^(n+m)
    double bound_h = 0.0;       // bound_hhat / d^(m/2)
    double sampling_error = 0.0;  // per-face-distance error bar
    bool degenerate = false;      // a == 0: eta too large relative to c
};
PositiveContentCertificate positive_content_certificate(const GridMap& f,
                                                        const GoodCubeWitness& w);

/// Total measure sum |Q| of dyadic cubes (level <= K-2) whose LP metric
/// derivative on the c0-dilated cube exceeds eps.
double quantdiff_sum(const GridMap& f, double eps, int c0 = 1);

}  // namespace contentlab
