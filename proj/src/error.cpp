#include "herdscan/error.hpp"

namespace herdscan {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateTimestamp: return "DuplicateTimestamp";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::UnfillableAsset: return "UnfillableAsset";
    case Errc::EmptySlice: return "EmptySlice";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::TooFewObservations: return "TooFewObservations";
    case Errc::DegenerateRegressor: return "DegenerateRegressor";
    case Errc::OneSidedSample: return "OneSidedSample";
    case Errc::ModelMismatch: return "ModelMismatch";
    case Errc::ZeroVarianceProxy: return "ZeroVarianceProxy";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ZeroVarianceAsset: return "ZeroVarianceAsset";
    case Errc::UncoveredNode: return "UncoveredNode";
    case Errc::VehicleTooSmall: return "VehicleTooSmall";
    case Errc::EmptyCommunity: return "EmptyCommunity";
    case Errc::IoFailure: return "IoFailure";
    case Errc::Config: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace herdscan
