#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace featurenull {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is outside its documented domain.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// An image file could not be decoded.
class DecodeError : public Error {
public:
  explicit DecodeError(std::filesystem::path path)
      : Error("cannot decode image: " + path.string()), path_(std::move(path)) {}

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

/// The image is smaller than the 31x31 patch (or whatever patch is configured).
class ImageTooSmallError : public Error {
public:
  using Error::Error;
};

/// A pixel neighbourhood required by an operator falls outside the image.
class OutOfBoundsError : public Error {
public:
  using Error::Error;
};

/// Input data has zero variance or otherwise makes a statistic undefined.
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

/// Input data is insufficient for the requested computation (too few points,
/// nothing scorable, empty corpus).
class DataError : public Error {
public:
  using Error::Error;
};

/// A persisted artifact (model file, feature store) is malformed.
class FormatError : public Error {
public:
  enum class Kind { BadMagic, VersionMismatch, Truncated, Invalid, Io };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

}  // namespace featurenull
