#include "rdt/error.hpp"

#include <fmt/format.h>

namespace rdt {

DefinitenessError::DefinitenessError(std::size_t index, double eigenvalue)
    : Error(fmt::format("metric not positive definite at grid index {} "
                        "(eigenvalue {:.6g})",
                        index, eigenvalue)),
      index_(index),
      eigenvalue_(eigenvalue) {}

SpdViolation::SpdViolation(double t, std::size_t index, double eigenvalue)
    : Error(fmt::format("spd guard: relative eigenvalue {:.6g} at grid index "
                        "{}, t = {:.9g}",
                        eigenvalue, index, t)),
      t_(t),
      index_(index),
      eigenvalue_(eigenvalue) {}

NonFiniteError::NonFiniteError(double t, std::size_t index)
    : Error(fmt::format("non-finite metric component at grid index {}, "
                        "t = {:.9g}",
                        index, t)),
      t_(t),
      index_(index) {}

}  // namespace rdt
