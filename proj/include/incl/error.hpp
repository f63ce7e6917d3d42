#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace incl {

enum class Errc {
  BadParam,
  DimensionMismatch,
  NonpositiveDeterminant,
  CertificationUnavailable,
  IllConditioned,
  NotInCone,
  HypothesisViolated,
  OnSingularAxis,
  OutsideDomain,
  TargetOnImage,
  Inconclusive,
};

std::string_view errc_name(Errc code) noexcept;

// Every domain failure in the library is reported through this type; the
// code identifies which precondition or numerical guard tripped.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::BadParam: return "BadParam";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonpositiveDeterminant: return "NonpositiveDeterminant";
    case Errc::CertificationUnavailable: return "CertificationUnavailable";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::NotInCone: return "NotInCone";
    case Errc::HypothesisViolated: return "HypothesisViolated";
    case Errc::OnSingularAxis: return "OnSingularAxis";
    case Errc::OutsideDomain: return "OutsideDomain";
    case Errc::TargetOnImage: return "TargetOnImage";
    case Errc::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

}  // namespace incl
