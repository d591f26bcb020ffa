#include "mapcolor/error.hpp"

namespace mapcolor {

std::string_view token(Errc code) {
  switch (code) {
    case Errc::MalformedInput: return "MALFORMED_INPUT";
    case Errc::MissingField: return "MISSING_FIELD";
    case Errc::DataInvalid: return "DATA_INVALID";
    case Errc::InvalidGeoJSON: return "INVALID_GEOJSON";
    case Errc::DegenerateData: return "DEGENERATE_DATA";
    case Errc::BadK: return "BAD_K";
    case Errc::TieCollapse: return "TIE_COLLAPSE";
    case Errc::TooFewValues: return "TOO_FEW_VALUES";
    case Errc::AllMethodsFailed: return "ALL_METHODS_FAILED";
    case Errc::ValueOutOfRange: return "VALUE_OUT_OF_RANGE";
    case Errc::BadHex: return "BAD_HEX";
    case Errc::CorruptPaletteFile: return "CORRUPT_PALETTE_FILE";
    case Errc::LengthMismatch: return "LENGTH_MISMATCH";
    case Errc::NoCandidates: return "NO_CANDIDATES";
    case Errc::AuthFailure: return "AUTH_FAILURE";
    case Errc::RateLimited: return "RATE_LIMITED";
    case Errc::Timeout: return "TIMEOUT";
    case Errc::ProviderError: return "PROVIDER_ERROR";
    case Errc::FixtureMiss: return "FIXTURE_MISS";
    case Errc::UnparseableResponse: return "UNPARSEABLE_RESPONSE";
    case Errc::BadSchemeType: return "BAD_SCHEME_TYPE";
    case Errc::WrongColorCount: return "WRONG_COLOR_COUNT";
    case Errc::ConceptInvalid: return "CONCEPT_INVALID";
    case Errc::PatchOutOfRange: return "PATCH_OUT_OF_RANGE";
    case Errc::StageIncomplete: return "STAGE_INCOMPLETE";
    case Errc::SessionNotFound: return "SESSION_NOT_FOUND";
    case Errc::PayloadTooLarge: return "PAYLOAD_TOO_LARGE";
    case Errc::BadRequest: return "BAD_REQUEST";
    case Errc::NotFound: return "NOT_FOUND";
    case Errc::Internal: return "INTERNAL";
  }
  return "INTERNAL";
}

}  // namespace mapcolor
