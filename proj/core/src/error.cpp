#include "escout/error.hpp"

namespace escout {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateTimestamp: return "DuplicateTimestamp";
    case Errc::OffGridTimestamp: return "OffGridTimestamp";
    case Errc::NegativeEnergy: return "NegativeEnergy";
    case Errc::HumidityOutOfRange: return "HumidityOutOfRange";
    case Errc::MalformedCalendar: return "MalformedCalendar";
    case Errc::MalformedDocument: return "MalformedDocument";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidWindow: return "InvalidWindow";
    case Errc::InvalidMaxPoints: return "InvalidMaxPoints";
    case Errc::UnknownZone: return "UnknownZone";
    case Errc::QuantizationMismatch: return "QuantizationMismatch";
    case Errc::UnsupportedPeriodCells: return "UnsupportedPeriodCells";
    case Errc::UnknownDevice: return "UnknownDevice";
    case Errc::UnknownEvent: return "UnknownEvent";
    case Errc::UnknownProfile: return "UnknownProfile";
    case Errc::UnknownPlan: return "UnknownPlan";
    case Errc::UnknownSeries: return "UnknownSeries";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::EmptyText: return "EmptyText";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

namespace {
std::string decorate(Errc code, const std::string& message,
                     std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}
}  // namespace

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

}  // namespace escout
