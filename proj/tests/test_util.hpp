#pragma once

#include <memory>
#include <string>

#include <gtest/gtest.h>

#include "hydrolab/flux.hpp"

namespace hydrolab::testing {

template <class Fn>
::testing::AssertionResult throws_with(Fn&& fn, const std::string& needle) {
  try {
    fn();
  } catch (const std::exception& e) {
    if (std::string(e.what()).find(needle) != std::string::npos) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "message was: " << e.what();
  }
  return ::testing::AssertionFailure() << "nothing thrown";
}

inline FluxModel dilute_model(double c = 0.5) {
  return FluxModel{JumpRateSpec::mm1(), DisorderLaw::dirac(1.0, c), 1.0};
}

inline std::shared_ptr<const FluxTable> dilute_table(double c = 0.5) {
  static const auto table = std::make_shared<const FluxTable>(FluxTable::from_model(dilute_model(0.5)));
  if (c == 0.5) return table;
  return std::make_shared<const FluxTable>(FluxTable::from_model(dilute_model(c)));
}

}  // namespace hydrolab::testing
