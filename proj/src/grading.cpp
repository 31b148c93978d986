#include "laminaplan/grading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "laminaplan/error.hpp"

namespace laminaplan {

std::string_view to_string(Grade g) {
    switch (g) {
    case Grade::A: return "A";
    case Grade::B: return "B";
    case Grade::C: return "C";
    }
    return "?";
}

Grade grade_from_string(std::string_view s) {
    if (s == "A") return Grade::A;
    if (s == "B") return Grade::B;
    if (s == "C") return Grade::C;
    throw Error(ErrorCode::Schema, "grade must be A, B or C, got \"" + std::string(s) + "\"", "grade");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool perpendicular_to(const Vec3& normal, const Vec3& axis, double tau_deg) {
    const double c = std::clamp(dot(normal, axis) / norm(normal), -1.0, 1.0);
    const double angle = std::acos(c) * 180.0 / std::numbers::pi;
    return std::abs(angle - 90.0) <= tau_deg;
}

/// Signed position along `axis` (through `origin`) where the plane crosses it.
bool axis_crossing(const CutPlane& plane, const Vec3& origin, const Vec3& axis, double& t) {
    const double denom = dot(axis, plane.normal);
    if (std::abs(denom) < 1e-12 * norm(plane.normal)) return false;
    t = dot(plane.point - origin, plane.normal) / denom;
    return true;
}

GradeResult result(PlaneName name, Grade g, double ratio, const char* reason) { return {name, g, ratio, reason}; }

} // namespace

GradeResult grade_longitudinal(const CutPlane& plane, const LandmarkSet& truth, const GradingOptions& options) {
    if (kind_of(plane.name) != PlaneKind::Longitudinal)
        throw Error(ErrorCode::InvalidParameter, "grade_longitudinal called on a transverse plane", "name");
    const FrameConstruction fc = construct_frame(truth);
    const Frame& f = fc.frame;

    if (!perpendicular_to(plane.normal, f.z_axis, options.tau_deg))
        return result(plane.name, Grade::C, kNaN, "not_perpendicular");
    double y_star = 0.0;
    if (!axis_crossing(plane, f.origin, f.y_axis, y_star)) return result(plane.name, Grade::C, kNaN, "non_intersecting");

    const bool left = plane.name == PlaneName::LeftLongitudinal;
    const double edge = dot(f.y_axis, (left ? fc.c_proj : fc.f_proj) - f.origin);
    if (left ? !(edge > 0.0) : !(edge < 0.0))
        throw Error(ErrorCode::DegenerateRegion, "truth medial pedicle edge lies on the wrong side of the midline",
                    left ? "C" : "F");

    const double r = y_star / edge;
    if (r > 1.0) return result(plane.name, Grade::C, r, "lateral_to_pedicle");
    if (r >= 2.0 / 3.0) return result(plane.name, Grade::A, r, "lateral_third");
    if (r >= 1.0 / 3.0) return result(plane.name, Grade::B, r, "middle_third");
    if (r >= 0.0) return result(plane.name, Grade::C, r, "medial_third");
    return result(plane.name, Grade::C, r, "crosses_midline");
}

GradeResult grade_transverse(const CutPlane& plane, const LandmarkSet& truth, const GradingOptions& options) {
    if (kind_of(plane.name) != PlaneKind::Transverse)
        throw Error(ErrorCode::InvalidParameter, "grade_transverse called on a longitudinal plane", "name");
    const FrameConstruction fc = construct_frame(truth);
    const Frame& f = fc.frame;

    const double x_j = dot(f.x_axis, (fc.d_proj + fc.e_proj) * 0.5 - f.origin);
    const double x_g = dot(f.x_axis, truth[Landmark::G] - f.origin);
    if (!(x_j > x_g))
        throw Error(ErrorCode::DegenerateRegion, "truth pedicle lower edge is not above the lower endplate", "G");

    if (!perpendicular_to(plane.normal, f.z_axis, options.tau_deg))
        return result(plane.name, Grade::C, kNaN, "not_perpendicular");
    double x_star = 0.0;
    if (!axis_crossing(plane, f.origin, f.x_axis, x_star)) return result(plane.name, Grade::C, kNaN, "non_intersecting");

    const double s = (x_star - x_g) / (x_j - x_g);
    if (s > 1.0) return result(plane.name, Grade::C, s, "above_pedicle_edge");
    if (s >= 0.5) return result(plane.name, Grade::A, s, "cephalic_half");
    if (s >= 0.0) return result(plane.name, Grade::B, s, "caudal_half");
    return result(plane.name, Grade::C, s, "below_endplate");
}

GradeResult grade_plane(const CutPlane& plane, const LandmarkSet& truth, const GradingOptions& options) {
    return kind_of(plane.name) == PlaneKind::Longitudinal ? grade_longitudinal(plane, truth, options)
                                                          : grade_transverse(plane, truth, options);
}

double percent_half_up(std::int64_t count, std::int64_t total) {
    if (total <= 0) return 0.0;
    // hundredths of a percent: round(count * 10000 / total), halves up
    const std::int64_t hundredths = (count * 20000 + total) / (2 * total);
    return static_cast<double>(hundredths) / 100.0;
}

PlanReport aggregate(const std::vector<std::pair<PlaneKind, Grade>>& grades) {
    PlanReport r;
    for (const auto& [kind, grade] : grades) {
        KindSummary& k = kind == PlaneKind::Longitudinal ? r.longitudinal : r.transverse;
        ++k.counts[static_cast<std::size_t>(grade)];
        ++k.total;
    }
    for (KindSummary* k : {&r.longitudinal, &r.transverse})
        for (std::size_t g = 0; g < 3; ++g) k->percent[g] = percent_half_up(k->counts[g], k->total);
    return r;
}

PlanReport aggregate(const std::vector<GradeResult>& grades) {
    std::vector<std::pair<PlaneKind, Grade>> pairs;
    pairs.reserve(grades.size());
    for (const auto& g : grades) pairs.emplace_back(kind_of(g.plane), g.grade);
    return aggregate(pairs);
}

std::string format_report_table(const PlanReport& report) {
    std::ostringstream os;
    const char* labels[] = {"Grade A, excellent", "Grade B, good", "Grade C, poor"};
    const auto cell = [](const KindSummary& k, std::size_t g) {
        std::ostringstream c;
        c.setf(std::ios::fixed);
        c.precision(2);
        c << k.counts[g] << " (" << k.percent[g] << "%)";
        return c.str();
    };
    os << std::left;
    os.width(20);
    os << "" << "  ";
    os.width(26);
    os << "Longitudinal cutting plane" << "  Transverse cutting plane\n";
    for (std::size_t g = 0; g < 3; ++g) {
        os.width(20);
        os << labels[g] << "  ";
        os.width(26);
        os << cell(report.longitudinal, g) << "  " << cell(report.transverse, g) << '\n';
    }
    os.width(20);
    os << "Total" << "  ";
    os.width(26);
    os << report.longitudinal.total << "  " << report.transverse.total << '\n';
    return os.str();
}

} // namespace laminaplan
