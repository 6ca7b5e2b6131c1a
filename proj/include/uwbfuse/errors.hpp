#pragma once

#include <stdexcept>
#include <string>

namespace uwbfuse {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scene, station, curve, or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Problems with measurement data: malformed records, unreadable CSV, etc.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A value outside the domain of a model function (e.g. a power outside a curve).
class DomainError : public DataError {
 public:
  DomainError(const std::string& what, double offending_value)
      : DataError(what), value_(offending_value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

class MalformedRecordError : public DataError {
 public:
  using DataError::DataError;
};

class StatisticsError : public DataError {
 public:
  using DataError::DataError;
};

/// Geometry problems detected by the position solver.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Candidate position coincides with a station, so a range gradient is undefined.
class SingularGeometryError : public GeometryError {
 public:
  SingularGeometryError(const std::string& what, int station_id)
      : GeometryError(what), station_id_(station_id) {}
  int station_id() const noexcept { return station_id_; }

 private:
  int station_id_;
};

/// Too few independent equations for a 2D fix.
class DegenerateGeometryError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

}  // namespace uwbfuse
