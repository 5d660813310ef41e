#pragma once

#include <stdexcept>
#include <string>

namespace curveprop {

/// Base of every error raised by the library. `name()` is the stable
/// identifier reported by the command-line runner.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
  virtual const char* name() const noexcept = 0;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
  const char* name() const noexcept override { return "invalid-argument"; }
};

class PreconditionViolation : public Error
{
public:
  using Error::Error;
  const char* name() const noexcept override { return "precondition-violation"; }
};

class DegenerateData : public Error
{
public:
  using Error::Error;
  const char* name() const noexcept override { return "degenerate-data"; }
};

class NoiseFloorError : public Error
{
public:
  NoiseFloorError(const std::string& what, double offending_time)
    : Error(what), time_(offending_time) {}
  const char* name() const noexcept override { return "noise-floor"; }
  double offending_time() const noexcept { return time_; }

private:
  double time_;
};

class UnsupportedDimension : public Error
{
public:
  using Error::Error;
  const char* name() const noexcept override { return "unsupported-dimension"; }
};

class DataIntegrityError : public Error
{
public:
  using Error::Error;
  const char* name() const noexcept override { return "data-integrity"; }
};

class IoError : public Error
{
public:
  IoError(const std::string& what, std::string path)
    : Error(what + ": " + path), path_(std::move(path)) {}
  const char* name() const noexcept override { return "io-error"; }
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Config validation failure; `field_path()` is a JSON-pointer-like path
/// such as "symbol.m1".
class ValidationError : public Error
{
public:
  ValidationError(std::string field_path, const std::string& what)
    : Error(field_path + ": " + what), path_(std::move(field_path)) {}
  const char* name() const noexcept override { return "validation"; }
  const std::string& field_path() const noexcept { return path_; }

private:
  std::string path_;
};

} // namespace curveprop
