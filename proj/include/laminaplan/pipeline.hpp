#pragma once

#include <cstdint>
#include <vector>

#include "laminaplan/frame.hpp"
#include "laminaplan/grading.hpp"
#include "laminaplan/heatmap.hpp"
#include "laminaplan/landmarks.hpp"
#include "laminaplan/volume.hpp"

namespace laminaplan {

/// Shared knobs of the command-line pipeline.
struct PipelineConfig {
    double w_min = kDefaultWindowMin;
    double w_max = kDefaultWindowMax;
    Dims3 target_dims{72, 128, 128};
    double sigma = kDefaultSigmaVoxels; ///< heatmap target width in voxels
    double tau_deg = kDefaultTauDeg;
    PlanMode mode = PlanMode::Partial;
    std::uint64_t seed = 0;

    /// Throws InvalidWindow / InvalidSigma / InvalidParameter.
    void validate() const;
};

/**
 * Plans on `predicted` landmarks and grades every plane against `truth`.
 *
 * If planning itself fails (degenerate or mis-oriented prediction) each plane
 * the mode would have produced is graded C with reason "planning_failed".
 */
std::vector<GradeResult> evaluate_plan(const LandmarkSet& predicted, const LandmarkSet& truth, PlanMode mode,
                                       const GradingOptions& options = {});

struct PerturbationOptions {
    int phantoms = 320;
    double sigma_mm = 0.65;
    std::uint64_t seed = 0;
    PlanMode mode = PlanMode::Partial;
    GradingOptions grading{};
};

/// Jitters analytic phantom landmarks, plans on them and grades against the exact ones.
PlanReport perturbation_report(const PerturbationOptions& options);

/// Share of A grades over both plane kinds, in [0, 1].
double grade_a_fraction(const PlanReport& r);
double grade_a_fraction(const KindSummary& k);

} // namespace laminaplan
