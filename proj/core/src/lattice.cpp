#include "hydrolab/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace hydrolab {

LatticeState::LatticeState(Window window, std::vector<Occupancy> occupancy, BoundaryMode mode)
    : window_(window), occ_(std::move(occupancy)), mode_(mode) {
  if (window_.size() <= 0 || static_cast<std::size_t>(window_.size()) != occ_.size())
    throw std::invalid_argument("lattice window and occupancies disagree");
  for (Occupancy n : occ_) {
    if (n < 0) throw std::invalid_argument("negative occupancy");
    if (n == kInfiniteOccupancy) ++inf_count_; else mass_ += n;
  }
}

LatticeState LatticeState::empty(Window window, BoundaryMode mode) {
  return LatticeState(window, std::vector<Occupancy>(static_cast<std::size_t>(std::max<std::int64_t>(window.size(), 0)), 0), mode);
}

Occupancy LatticeState::at(std::int64_t x) const {
  if (!contains(x)) throw std::out_of_range("site outside lattice window");
  return (*this)[x];
}

void LatticeState::set(std::int64_t x, Occupancy n) {
  if (!contains(x)) throw std::out_of_range("site outside lattice window");
  if (n < 0) throw std::invalid_argument("negative occupancy");
  Occupancy& slot = occ_[static_cast<std::size_t>(x - window_.lo)];
  if (slot == kInfiniteOccupancy) --inf_count_; else mass_ -= slot;
  slot = n;
  if (n == kInfiniteOccupancy) ++inf_count_; else mass_ += n;
}

void LatticeState::transfer(std::int64_t x, std::int64_t y) noexcept {
  Occupancy& from = occ_[static_cast<std::size_t>(x - window_.lo)];
  Occupancy& to = occ_[static_cast<std::size_t>(y - window_.lo)];
  if (from != kInfiniteOccupancy) {
    --from;
    --mass_;
  }
  if (to != kInfiniteOccupancy) {
    ++to;
    ++mass_;
  }
}

void LatticeState::remove(std::int64_t x) noexcept {
  Occupancy& from = occ_[static_cast<std::size_t>(x - window_.lo)];
  if (from != kInfiniteOccupancy) {
    --from;
    --mass_;
  }
}

std::int64_t LatticeState::mass_between(std::int64_t a, std::int64_t b) const {
  std::int64_t s = 0;
  for (std::int64_t x = std::max(a, window_.lo); x <= std::min(b, window_.hi); ++x) {
    const Occupancy n = (*this)[x];
    if (n != kInfiniteOccupancy) s += n;
  }
  return s;
}

namespace {

void require_common_finite(const LatticeState& eta, const LatticeState& xi) {
  if (!(eta.window() == xi.window())) throw std::invalid_argument("configurations on different windows");
  if (eta.infinite_sites() || xi.infinite_sites())
    throw std::domain_error("undefined for infinite configurations");
}

}  // namespace

std::int64_t delta_distance(const LatticeState& eta, const LatticeState& xi) {
  require_common_finite(eta, xi);
  std::int64_t partial = 0;
  std::int64_t best = 0;
  for (std::int64_t x = eta.x_min(); x <= eta.x_max(); ++x) {
    partial += static_cast<std::int64_t>(eta[x]) - xi[x];
    best = std::max(best, partial < 0 ? -partial : partial);
  }
  return best;
}

std::size_t sign_changes(const LatticeState& eta, const LatticeState& xi) {
  if (!(eta.window() == xi.window())) throw std::invalid_argument("configurations on different windows");
  int last = 0;
  std::size_t changes = 0;
  for (std::int64_t x = eta.x_min(); x <= eta.x_max(); ++x) {
    const Occupancy a = eta[x];
    const Occupancy b = xi[x];
    const int s = a > b ? 1 : (a < b ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

bool dominated(const LatticeState& eta, const LatticeState& xi) {
  if (!(eta.window() == xi.window())) throw std::invalid_argument("configurations on different windows");
  for (std::int64_t x = eta.x_min(); x <= eta.x_max(); ++x)
    if (eta[x] > xi[x]) return false;
  return true;
}

double block_density(const LatticeState& state, std::int64_t x, std::int64_t l) {
  if (l < 0) throw std::domain_error("negative block half-width");
  if (!state.contains(x - l) || !state.contains(x + l)) throw std::out_of_range("block outside lattice window");
  std::int64_t s = 0;
  for (std::int64_t y = x - l; y <= x + l; ++y) {
    const Occupancy n = state[y];
    if (n == kInfiniteOccupancy) throw std::domain_error("infinite occupancy in block");
    s += n;
  }
  return static_cast<double>(s) / static_cast<double>(2 * l + 1);
}

}  // namespace hydrolab
