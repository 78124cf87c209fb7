#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace escout {

enum class Errc {
  // ingestion
  MalformedRow,
  DuplicateTimestamp,
  OffGridTimestamp,
  NegativeEnergy,
  HumidityOutOfRange,
  MalformedCalendar,
  MalformedDocument,
  // arguments
  InvalidArgument,
  InvalidWindow,
  InvalidMaxPoints,
  UnknownZone,
  QuantizationMismatch,
  UnsupportedPeriodCells,
  // household model
  UnknownDevice,
  UnknownEvent,
  UnknownProfile,
  UnknownPlan,
  UnknownSeries,
  InvariantViolation,
  EmptyText,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the engine. `line()` is set for errors tied to
/// a 1-based input line.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  [[nodiscard]] Errc code() const noexcept { return code_; }
  [[nodiscard]] std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  Errc code_;
  std::optional<std::size_t> line_;
};

}  // namespace escout
