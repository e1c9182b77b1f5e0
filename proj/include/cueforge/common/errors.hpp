#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cueforge {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input record; `index` is the offending record, or -1 for the envelope.
class ParseError : public Error
{
  public:
    ParseError(const std::string& what, int index = -1) : Error(what), index_(index) {}
    int index() const noexcept { return index_; }

  private:
    int index_;
};

class ValidationError : public Error
{
  public:
    ValidationError(const std::string& what, int index = -1) : Error(what), index_(index) {}
    int index() const noexcept { return index_; }

  private:
    int index_;
};

enum class GeometryFailure
{
    line_estimation,
    degenerate_configuration,
    correspondence,
    projection,
    camera,
};

class GeometryError : public Error
{
  public:
    GeometryError(GeometryFailure kind, const std::string& what, int lines_found = -1,
                  std::vector<int> side_counts = {})
        : Error(what), kind_(kind), lines_found_(lines_found), side_counts_(std::move(side_counts))
    {
    }

    GeometryFailure kind() const noexcept { return kind_; }
    int lines_found() const noexcept { return lines_found_; }
    const std::vector<int>& side_counts() const noexcept { return side_counts_; }

  private:
    GeometryFailure kind_;
    int lines_found_;
    std::vector<int> side_counts_;
};

class ActionError : public Error
{
  public:
    using Error::Error;
};

class PlacementError : public Error
{
  public:
    using Error::Error;
};

} // namespace cueforge
