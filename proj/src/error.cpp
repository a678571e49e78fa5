#include "edgeview/error.hpp"

namespace edgeview {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::SymmetryViolation: return "symmetry violation";
    case ErrorKind::RankDeficiency: return "rank deficiency";
    case ErrorKind::PencilDegeneracy: return "pencil degeneracy";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::DegenerateComponent: return "degenerate component";
    case ErrorKind::UnderdeterminedSystem: return "underdetermined system";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::DegenerateMixture: return "degenerate mixture";
    case ErrorKind::UnresolvedAmbiguity: return "unresolved ambiguity";
    case ErrorKind::PilotDesign: return "pilot design";
    case ErrorKind::Detection: return "detection";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace edgeview
