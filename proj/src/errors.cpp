#include "netpsy/errors.hpp"

namespace netpsy {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::missing_column: return "MissingColumn";
    case Errc::non_numeric_cell: return "NonNumericCell";
    case Errc::duplicate_time_index: return "DuplicateTimeIndex";
    case Errc::all_missing_item: return "AllMissingItem";
    case Errc::too_many_variables: return "TooManyVariables";
    case Errc::too_many_factors: return "TooManyFactors";
    case Errc::insufficient_observations: return "InsufficientObservations";
    case Errc::missing_values: return "MissingValues";
    case Errc::domain_error: return "DomainError";
    case Errc::unknown_key: return "UnknownKey";
    case Errc::io_error: return "IoError";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::not_psd_after_shift: return "NotPsdAfterShift";
    case Errc::singular_i_minus_omega: return "SingularIMinusOmega";
    case Errc::singular_i_minus_b: return "SingularIMinusB";
    case Errc::collinear_predictors: return "CollinearPredictors";
    case Errc::unstable_model: return "UnstableModel";
    case Errc::unachievable: return "Unachievable";
  }
  return "UnknownError";
}

bool errc_is_numeric(Errc code) {
  switch (code) {
    case Errc::not_positive_definite:
    case Errc::not_psd_after_shift:
    case Errc::singular_i_minus_omega:
    case Errc::singular_i_minus_b:
    case Errc::collinear_predictors:
    case Errc::unstable_model:
    case Errc::unachievable:
      return true;
    default:
      return false;
  }
}

}  // namespace netpsy
