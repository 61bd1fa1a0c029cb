#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace herdscan {

enum class Errc {
  MalformedRow,
  DuplicateTimestamp,
  NonPositivePrice,
  EmptyGrid,
  UnfillableAsset,
  EmptySlice,
  RankDeficient,
  TooFewObservations,
  DegenerateRegressor,
  OneSidedSample,
  ModelMismatch,
  ZeroVarianceProxy,
  EmptyInput,
  ZeroVarianceAsset,
  UncoveredNode,
  VehicleTooSmall,
  EmptyCommunity,
  IoFailure,
  Config,
};

std::string_view to_string(Errc code);

// Configuration problems map to exit code 2, everything else to 3.
constexpr bool is_config_error(Errc code) { return code == Errc::Config; }

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace herdscan
