#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flexlp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid polygon, degenerate corner, or an inset that collapses a polygon.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Two bodies overlap deeper than the allowed penetration tolerance.
class PenetrationError : public Error {
 public:
  PenetrationError(const std::string& what, std::size_t outer_body,
                   std::size_t inner_body, std::size_t inner_vertex,
                   double depth)
      : Error(what),
        outer_body(outer_body),
        inner_body(inner_body),
        inner_vertex(inner_vertex),
        depth(depth) {}

  std::size_t outer_body;
  std::size_t inner_body;
  std::size_t inner_vertex;
  double depth;
};

/// Malformed scene files, bad CLI values, inconsistent specs.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace flexlp
