#pragma once

#include <stdexcept>
#include <string>

namespace pastegen {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyMask : Error {
  using Error::Error;
};

struct EmptyPool : Error {
  using Error::Error;
};

struct DegenerateScale : Error {
  using Error::Error;
};

struct NoValidPosition : Error {
  using Error::Error;
};

struct InsufficientRegion : Error {
  using Error::Error;
};

struct TooFewScenes : Error {
  using Error::Error;
};

struct EmptyTestSet : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace pastegen
