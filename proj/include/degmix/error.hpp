#pragma once

#include <stdexcept>
#include <string>

namespace degmix {

enum class ErrorCode {
  InvalidArgument,
  ConductorNotOnLattice,
  DegenerateCell,
  MissingTag,
  SpaceMismatch,
  NoConductorCells,
  SingularSystem,
  ResidualTooLarge,
  NotDenseFeasible,
  StokesInstance,
  TooFewLevels,
  ConfigParse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConductorNotOnLattice: return "ConductorNotOnLattice";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::MissingTag: return "MissingTag";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NoConductorCells: return "NoConductorCells";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::NotDenseFeasible: return "NotDenseFeasible";
    case ErrorCode::StokesInstance: return "StokesInstance";
    case ErrorCode::TooFewLevels: return "TooFewLevels";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

}  // namespace degmix
