#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contentlab/dyadic.hpp"
#include "contentlab/metric.hpp"

namespace contentlab {

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Default cap for exact estimators (exhaustive search), per config.
inline constexpr int kExactThreshold = 12;

enum class EstimateKind { upper, lower, exact_small };

struct BallSpec {
    std::int32_t center = -1;  // target point index
    double radius = 0.0;
};

/// Outcome of a Hausdorff-content estimator on a finite point set.
///
/// `value` is the cost of the computed cover of the samples; a set of zero
/// diameter costs 0 (it is one metric point). `continuum_value` certifies an
/// upper bound for the content of any continuum set the samples are dense in
/// at scale r_min: every cover radius is inflated by one dyadic step (zero
/// radii become r_min) before costing. The inflation is recorded, never
/// silently folded into `value`.
struct ContentEstimate {
    double value = 0.0;
    double continuum_value = 0.0;
    EstimateKind kind = EstimateKind::upper;
    std::string method;
    double r_min = 0.0;      // effective (dyadic) minimum radius
    double inflation = 1.0;  // 2^k, the generic value -> continuum factor
    std::vector<BallSpec> balls;  // realizing cover when ball-based
};

/// Smallest power of two >= r (the dyadic radius grid starts here).
double dyadic_round_up(double r);

/// Greedy cover of A by metric balls centered at points of A with dyadic
/// radii >= r_min, cost sum (2r)^k. Ball choice maximizes newly covered
/// points per cost; ties broken by most covered, then smallest center index,
/// then smallest radius. Deterministic. Throws on empty A.
ContentEstimate content_upper(const TargetSpace& space,
                              std::span<const std::int32_t> A, int k, double r_min);

/// Exact minimum over covers of A by subsets of A of sum diam(subset)^k,
/// found by exhaustive search over set partitions (covers never beat
/// partitions for diameter costs). With k >= 1 and unrestricted parts the
/// optimum is 0 via singletons, so this is a cross-checking oracle for
/// clustered instances, not a continuum estimate. `max_parts` = 0 means
/// unrestricted. Throws if |A| > threshold.
ContentEstimate content_exact_small(const TargetSpace& space,
                                    std::span<const std::int32_t> A, int k,
                                    int max_parts = 0,
                                    int threshold = kExactThreshold);

/// Exact optimum over the same ball class content_upper searches greedily
/// (centers in A, dyadic radii >= r_min), by exhaustive weighted set cover.
/// Throws if |A| > threshold.
ContentEstimate content_balls_exact(const TargetSpace& space,
                                    std::span<const std::int32_t> A, int k,
                                    double r_min, int threshold = kExactThreshold);

enum class TermMode { greedy, exact_balls };

/// Result of the dyadic-cover dynamic program for mapping content.
struct DPResult {
    double value = 0.0;            // minimized sum of sample-cover terms
    double continuum_value = 0.0;  // certified continuum bound on the chosen cover
    std::vector<DyadicCube> cover;      // realizing almost-disjoint cover
    std::vector<double> per_cube;       // term of each cover cube
    double r_min = 0.0;                 // effective dyadic r_min used in terms
    double inflation = 1.0;             // 2^n generic certification factor
    TermMode mode = TermMode::greedy;
    int l_max = 0;
};

struct DPOptions {
    TermMode mode = TermMode::greedy;
    std::optional<double> r_min;  // default sqrt(d) * 2^-K * declared_lip
    int exact_threshold = kExactThreshold;
};

/// Exact minimum over all almost-disjoint dyadic covers of Q_0 by cubes of
/// level <= L_max of sum term(Q_i), where term(Q) is the ball-cover content
/// of the image samples of the closed cube times side(Q)^m. Computed bottom
/// up: cost(Q) = min(term(Q), sum over children). Requires L_max <= K.
DPResult mapping_content_upper(const GridMap& f, int L_max, const DPOptions& opts = {});

/// Evidence for the face-distance lower bound: one distance per axis
/// k = 1..n between the images of the opposite faces of Q_0, with lattice
/// witnesses, their product, and the sampling error bar.
struct FaceCertificate {
    std::vector<double> axis_distances;              // size n
    std::vector<std::pair<std::int64_t, std::int64_t>> witnesses;  // lattice idx
    double product = 0.0;
    double per_axis_error = 0.0;  // declared_lip * sqrt(d) * 2^-K
    double sampling_error = 0.0;  // product - prod max(0, dist - per_axis_error)
};

/// Face distances over lattice samples; the product lower-bounds both content
/// flavors up to the reported sampling error. Requires n >= 1.
FaceCertificate faces_lower_bound(const GridMap& f);

/// Weighted cover of (a sampled picture of) a space, with the intersection
/// graph of its sets. Universe indices are target point indices or lattice
/// indices depending on how the cover was built.
enum class CoverUniverse { target_points, lattice_points };

struct CoverWeighting {
    CoverUniverse universe = CoverUniverse::target_points;
    std::vector<std::vector<std::int64_t>> sets;      // sorted universe indices
    std::vector<std::vector<double>> weights;         // per set, d values
    std::vector<std::vector<std::int32_t>> adjacency; // nerve, symmetric

    std::size_t set_count() const { return sets.size(); }
};

/// Nerve from literal shared-index intersection of the given point sets.
CoverWeighting cover_from_sets(CoverUniverse universe,
                               std::vector<std::vector<std::int64_t>> sets,
                               std::vector<std::vector<double>> weights);

/// Cover of the points A by balls, nerve from ball geometry
/// (d(c_i, c_j) <= r_i + r_j), which matches continuum intersection for
/// sup-metric clouds. Weight rows are caller-chosen (d per set).
CoverWeighting cover_from_balls(const TargetSpace& space,
                                std::span<const std::int32_t> A,
                                std::span<const BallSpec> balls,
                                std::vector<std::vector<double>> weights);

/// Minimum total weight w_k over chains of pairwise-intersecting sets whose
/// first set meets E and last meets F (node-weighted shortest path on the
/// nerve). Returns kInfiniteDistance when no chain exists. E, F must be
/// sorted.
double chain_distance(const CoverWeighting& cw, int axis,
                      std::span<const std::int64_t> E,
                      std::span<const std::int64_t> F);

struct KinnebergReport {
    double lhs = 0.0;
    double rhs = 0.0;
    std::vector<double> per_axis;  // chain distance per axis
    bool holds = false;            // lhs >= rhs - 1e-9
};

/// Kinneberg's inequality check: sum over sets of the weight product vs the
/// product over axes of the face-to-face chain distances. Throws if the
/// cover misses part of the sampled image.
KinnebergReport kinneberg_check(const GridMap& g, const CoverWeighting& cw);

/// Product-space cover for the lift h(x,y) = (f(x,y), y): each domain set
/// S_i carries an open ball cover of its image samples; the lifted set
/// V^i_j collects lattice points whose image lies in U^i_j and whose y-block
/// is within eta of Proj_y(S_i). Weights are diam(U^i_j) for the first n
/// axes and diam(S_i) + 2 eta for the rest. Nerve from componentwise
/// product-set intersection.
CoverWeighting lifted_cover(const GridMap& f,
                            const std::vector<std::vector<std::int64_t>>& domain_sets,
                            const std::vector<std::vector<BallSpec>>& image_covers,
                            double eta);

}  // namespace contentlab
