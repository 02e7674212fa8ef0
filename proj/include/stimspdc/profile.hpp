#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stimspdc/grid.hpp"

namespace stimspdc {

enum class ProfileComponent
{
  total,
  spontaneous,
  stimulated,
};

/// Idler intensity on the detection grid, split into the spontaneous and
/// stimulated contributions. total is always the pointwise sum.
class IntensityProfile
{
public:
  IntensityProfile() = default;

  IntensityProfile(GridSpec grid, std::vector<double> spontaneous, std::vector<double> stimulated)
    : grid_(std::move(grid)), spontaneous_(std::move(spontaneous)), stimulated_(std::move(stimulated))
  {
    if (spontaneous_.size() != grid_.size() || stimulated_.size() != grid_.size())
      throw std::invalid_argument("IntensityProfile: component length does not match grid");
    total_.resize(grid_.size());
    for (std::size_t i = 0; i < total_.size(); ++i) {
      if (spontaneous_[i] < 0.0 || stimulated_[i] < 0.0)
        throw std::invalid_argument("IntensityProfile: negative intensity");
      total_[i] = spontaneous_[i] + stimulated_[i];
    }
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const double> spontaneous() const { return spontaneous_; }
  std::span<const double> stimulated() const { return stimulated_; }
  std::span<const double> total() const { return total_; }

  std::span<const double> component(ProfileComponent c) const
  {
    switch (c) {
    case ProfileComponent::spontaneous: return spontaneous_;
    case ProfileComponent::stimulated: return stimulated_;
    default: return total_;
    }
  }

  double peak() const { return total_.empty() ? 0.0 : *std::max_element(total_.begin(), total_.end()); }

  IntensityProfile scaled(double s) const
  {
    std::vector<double> sp = spontaneous_, st = stimulated_;
    for (auto& v : sp)
      v *= s;
    for (auto& v : st)
      v *= s;
    return IntensityProfile(grid_, std::move(sp), std::move(st));
  }

  /// Scaled so that max(total) = 1; an all-zero profile is returned as is.
  IntensityProfile normalized() const
  {
    const double p = peak();
    if (!(p > 0.0))
      return *this;
    std::vector<double> sp = spontaneous_, st = stimulated_;
    for (auto& v : sp)
      v /= p;
    for (auto& v : st)
      v /= p;
    return IntensityProfile(grid_, std::move(sp), std::move(st));
  }

private:
  GridSpec grid_;
  std::vector<double> spontaneous_;
  std::vector<double> stimulated_;
  std::vector<double> total_;
};

} // namespace stimspdc
