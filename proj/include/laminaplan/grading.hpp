#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "laminaplan/frame.hpp"
#include "laminaplan/landmarks.hpp"

namespace laminaplan {

/// Plan quality: A excellent, B good, C poor.
enum class Grade { A, B, C };

std::string_view to_string(Grade g);
Grade grade_from_string(std::string_view s);

/// True when `a` is strictly better than `b` (A > B > C).
constexpr bool better(Grade a, Grade b) { return static_cast<int>(a) < static_cast<int>(b); }

inline constexpr double kDefaultTauDeg = 5.0;

struct GradingOptions {
    double tau_deg = kDefaultTauDeg; ///< allowed deviation from perpendicular to the truth Z axis
};

struct GradeResult {
    PlaneName plane = PlaneName::LeftLongitudinal;
    Grade grade = Grade::C;
    double ratio = 0.0;  ///< r (longitudinal) or s (transverse); NaN when not reached
    std::string reason;  ///< short machine-readable tag
};

/**
 * Longitudinal plane against the truth anatomy.
 *
 * The plane must be within tau of perpendicular to the truth Z axis. It is
 * then intersected with the truth Y axis line at y*, and r = y* / y(edge), where
 * the edge is C' for the left plane and F' for the right plane:
 *   r in [2/3, 1] -> A, [1/3, 2/3) -> B, [0, 1/3) -> C, r > 1 or r < 0 -> C.
 */
GradeResult grade_longitudinal(const CutPlane& plane, const LandmarkSet& truth, const GradingOptions& options = {});

/**
 * Transverse plane against the truth anatomy.
 *
 * Intersected with the truth X axis line at x*; s = (x* - x_G) / (x_J - x_G)
 * with J the midpoint of D'E'. s in [0.5, 1] -> A, [0, 0.5) -> B, otherwise C.
 * Throws DegenerateRegion when x_J <= x_G.
 */
GradeResult grade_transverse(const CutPlane& plane, const LandmarkSet& truth, const GradingOptions& options = {});

/// Dispatches on the plane's kind.
GradeResult grade_plane(const CutPlane& plane, const LandmarkSet& truth, const GradingOptions& options = {});

struct KindSummary {
    std::array<std::int64_t, 3> counts{0, 0, 0}; ///< A, B, C
    std::array<double, 3> percent{0.0, 0.0, 0.0};
    std::int64_t total = 0;

    bool operator==(const KindSummary&) const = default;
};

/// Table-style summary per plane kind.
struct PlanReport {
    KindSummary longitudinal;
    KindSummary transverse;

    const KindSummary& of(PlaneKind k) const { return k == PlaneKind::Longitudinal ? longitudinal : transverse; }
    bool operator==(const PlanReport&) const = default;
};

/// count / total * 100 rounded half-up to two decimals (exact integer arithmetic).
double percent_half_up(std::int64_t count, std::int64_t total);

PlanReport aggregate(const std::vector<std::pair<PlaneKind, Grade>>& grades);
PlanReport aggregate(const std::vector<GradeResult>& grades);

/// Plain-text rendering of the report in the usual results-table layout.
std::string format_report_table(const PlanReport& report);

} // namespace laminaplan
