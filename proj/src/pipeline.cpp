#include "laminaplan/pipeline.hpp"

#include <cmath>
#include <limits>

#include "laminaplan/error.hpp"
#include "laminaplan/phantom.hpp"

namespace laminaplan {

void PipelineConfig::validate() const {
    if (!std::isfinite(w_min) || !std::isfinite(w_max) || !(w_max > w_min))
        throw Error(ErrorCode::InvalidWindow, "window requires finite w_min < w_max", "w_min");
    if (target_dims.nz <= 0 || target_dims.ny <= 0 || target_dims.nx <= 0)
        throw Error(ErrorCode::InvalidParameter, "target dims must be positive", "target_dims");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw Error(ErrorCode::InvalidSigma, "sigma must be finite and > 0", "sigma");
    if (!(tau_deg >= 0.0 && tau_deg <= 90.0))
        throw Error(ErrorCode::InvalidParameter, "tau_deg must lie in [0, 90]", "tau_deg");
}

std::vector<GradeResult> evaluate_plan(const LandmarkSet& predicted, const LandmarkSet& truth, PlanMode mode,
                                       const GradingOptions& options) {
    std::vector<CutPlane> planes;
    try {
        planes = plan_planes(predicted, mode);
    } catch (const Error&) {
        std::vector<GradeResult> failed;
        for (PlaneName n : {PlaneName::LeftLongitudinal, PlaneName::RightLongitudinal, PlaneName::Transverse}) {
            if (n == PlaneName::Transverse && mode == PlanMode::Total) continue;
            failed.push_back({n, Grade::C, std::numeric_limits<double>::quiet_NaN(), "planning_failed"});
        }
        return failed;
    }
    std::vector<GradeResult> out;
    out.reserve(planes.size());
    for (const CutPlane& p : planes) out.push_back(grade_plane(p, truth, options));
    return out;
}

PlanReport perturbation_report(const PerturbationOptions& options) {
    if (options.phantoms <= 0)
        throw Error(ErrorCode::InvalidParameter, "phantom count must be positive", "phantoms");
    std::vector<GradeResult> all;
    all.reserve(static_cast<std::size_t>(options.phantoms) * 3);
    for (int i = 0; i < options.phantoms; ++i) {
        const std::uint64_t s = options.seed + static_cast<std::uint64_t>(i);
        const LandmarkSet truth = phantom_landmarks(sample_phantom_params(s));
        const LandmarkSet noisy = jitter_landmarks(truth, options.sigma_mm, s ^ 0x9E3779B97F4A7C15ULL);
        for (GradeResult& g : evaluate_plan(noisy, truth, options.mode, options.grading)) all.push_back(std::move(g));
    }
    return aggregate(all);
}

double grade_a_fraction(const KindSummary& k) {
    return k.total == 0 ? 0.0 : static_cast<double>(k.counts[0]) / static_cast<double>(k.total);
}

double grade_a_fraction(const PlanReport& r) {
    const std::int64_t total = r.longitudinal.total + r.transverse.total;
    if (total == 0) return 0.0;
    return static_cast<double>(r.longitudinal.counts[0] + r.transverse.counts[0]) / static_cast<double>(total);
}

} // namespace laminaplan
