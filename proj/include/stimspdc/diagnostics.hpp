#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stimspdc {

/// Non-fatal numerical warning (sampling, validity of an approximation).
struct Warning
{
  std::string code;
  std::string message;

  bool operator==(const Warning&) const = default;
};

/// Collects warnings raised while a pipeline runs. Passing nullptr to the
/// compute functions discards them.
class Diagnostics
{
public:
  void warn(std::string code, std::string message)
  {
    for (const auto& w : warnings_)
      if (w.code == code && w.message == message)
        return;
    warnings_.push_back({std::move(code), std::move(message)});
  }

  const std::vector<Warning>& warnings() const { return warnings_; }
  bool empty() const { return warnings_.empty(); }
  bool has(const std::string& code) const
  {
    for (const auto& w : warnings_)
      if (w.code == code)
        return true;
    return false;
  }

private:
  std::vector<Warning> warnings_;
};

inline void warn(Diagnostics* diag, std::string code, std::string message)
{
  if (diag != nullptr)
    diag->warn(std::move(code), std::move(message));
}

class GridMismatchError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class SlitOffGridError : public std::out_of_range
{
public:
  using std::out_of_range::out_of_range;
};

} // namespace stimspdc
