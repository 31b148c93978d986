#include "laminaplan/landmarks.hpp"

#include <string>

#include "laminaplan/error.hpp"

namespace laminaplan {

void validate(const LandmarkSet& lm) {
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        if (!lm.points[i].is_finite())
            throw Error(ErrorCode::InvalidParameter, "landmark has a non-finite coordinate",
                        std::string(kLandmarkNames[i]));
    }
    if (lm[Landmark::A] == lm[Landmark::B])
        throw Error(ErrorCode::DegenerateAxis, "landmarks A and B coincide", "A");
}

} // namespace laminaplan
