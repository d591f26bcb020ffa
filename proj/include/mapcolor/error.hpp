#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace mapcolor {

// Closed set of failure kinds. The service layer maps each to an HTTP status
// and publishes token() as the machine-readable error code.
enum class Errc {
  MalformedInput,
  MissingField,
  DataInvalid,
  InvalidGeoJSON,
  DegenerateData,
  BadK,
  TieCollapse,
  TooFewValues,
  AllMethodsFailed,
  ValueOutOfRange,
  BadHex,
  CorruptPaletteFile,
  LengthMismatch,
  NoCandidates,
  AuthFailure,
  RateLimited,
  Timeout,
  ProviderError,
  FixtureMiss,
  UnparseableResponse,
  BadSchemeType,
  WrongColorCount,
  ConceptInvalid,
  PatchOutOfRange,
  StageIncomplete,
  SessionNotFound,
  PayloadTooLarge,
  BadRequest,
  NotFound,
  Internal,
};

std::string_view token(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, nlohmann::json details = nullptr)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  Errc code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

 private:
  Errc code_;
  nlohmann::json details_;
};

}  // namespace mapcolor
