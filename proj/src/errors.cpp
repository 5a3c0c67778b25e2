#include "tscale/error.hpp"

#include <sstream>

namespace tscale {

namespace {

std::string describe(const char* what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << t;
  return os.str();
}

}  // namespace

PointNotInTimeScale::PointNotInTimeScale(double t)
    : Error(describe("point not in time scale: ", t)), point_(t) {}

OffNodeEvaluation::OffNodeEvaluation(double t)
    : Error(describe("evaluation away from grid nodes at t = ", t)) {}

EnsembleTooSmall::EnsembleTooSmall(std::size_t got, std::size_t needed)
    : Error("ensemble too small: " + std::to_string(got) + " paths, need at least " +
            std::to_string(needed)) {}

}  // namespace tscale
