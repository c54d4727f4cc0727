#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hydrolab/environment.hpp"
#include "hydrolab/rates.hpp"

namespace hydrolab {

enum class BoundaryMode {
  closed,       // jumps leaving the window are suppressed
  left_source,  // the left exterior is an infinite reservoir that absorbs jumps
};

/// Occupancies on a finite window. kInfiniteOccupancy marks a reservoir site.
class LatticeState {
 public:
  LatticeState() = default;
  LatticeState(Window window, std::vector<Occupancy> occupancy, BoundaryMode mode = BoundaryMode::closed);
  static LatticeState empty(Window window, BoundaryMode mode = BoundaryMode::closed);

  const Window& window() const noexcept { return window_; }
  std::int64_t x_min() const noexcept { return window_.lo; }
  std::int64_t x_max() const noexcept { return window_.hi; }
  std::size_t size() const noexcept { return occ_.size(); }
  bool contains(std::int64_t x) const noexcept { return window_.contains(x); }
  BoundaryMode boundary() const noexcept { return mode_; }
  void set_boundary(BoundaryMode mode) noexcept { mode_ = mode; }

  Occupancy operator[](std::int64_t x) const noexcept { return occ_[static_cast<std::size_t>(x - window_.lo)]; }
  Occupancy at(std::int64_t x) const;
  void set(std::int64_t x, Occupancy n);
  std::span<const Occupancy> occupancies() const noexcept { return occ_; }

  /// Moves one particle from x to y; reservoirs neither lose nor gain.
  void transfer(std::int64_t x, std::int64_t y) noexcept;
  /// Removes one particle from x unless x is a reservoir.
  void remove(std::int64_t x) noexcept;

  /// Particles on finite sites.
  std::int64_t finite_mass() const noexcept { return mass_; }
  std::size_t infinite_sites() const noexcept { return inf_count_; }
  /// Sum of finite occupancies over [a, b] intersected with the window.
  std::int64_t mass_between(std::int64_t a, std::int64_t b) const;

  friend bool operator==(const LatticeState& a, const LatticeState& b) {
    return a.window_ == b.window_ && a.occ_ == b.occ_ && a.mode_ == b.mode_;
  }

 private:
  Window window_;
  std::vector<Occupancy> occ_;
  BoundaryMode mode_ = BoundaryMode::closed;
  std::int64_t mass_ = 0;
  std::size_t inf_count_ = 0;
};

/// sup over x of |sum_{y <= x} (eta - xi)(y)| on a common window.
std::int64_t delta_distance(const LatticeState& eta, const LatticeState& xi);
/// Sign changes of eta - xi along the window, zeros skipped.
std::size_t sign_changes(const LatticeState& eta, const LatticeState& xi);
/// True when eta <= xi sitewise.
bool dominated(const LatticeState& eta, const LatticeState& xi);

/// Mean occupancy over [x - l, x + l].
double block_density(const LatticeState& state, std::int64_t x, std::int64_t l);

}  // namespace hydrolab
